#pragma once

// Lumped RLC model of one monitored line section and its closed-form
// eigenvalues. These matrices are the physics model the estimator fits
// against; the time-domain simulator lives in waveform_sim.hpp.

#include <array>
#include <complex>

namespace hifd {

inline constexpr double kPi = 3.14159265358979323846;

/// Resistance used to stand in for "no fault"; large enough that the
/// faulted matrix is indistinguishable from the healthy one.
inline constexpr double kOpenFaultOhm = 1e12;

/// Series/shunt parameters of the line plus nominal source data.
struct LineParams {
    double r_series = 0.0;   // ohm
    double l_series = 0.0;   // henry
    double c_shunt = 0.0;    // farad
    double v_nominal = 0.0;  // volt RMS (sending-end source)
    double f_nominal = 60.0; // hertz
    double i_nominal = 0.0;  // ampere RMS at rated load

    [[nodiscard]] double omega_nominal() const { return 2.0 * kPi * f_nominal; }
};

/// Throws InvalidParameterError unless all LineParams invariants hold.
void validate(const LineParams& p);

/// 2x2 state matrix over states (line current i, capacitor voltage v_c)
/// with single input v(t).
struct StateMatrix2 {
    std::array<std::array<double, 2>, 2> a{};
    std::array<double, 2> b{};

    [[nodiscard]] double trace() const { return a[0][0] + a[1][1]; }
    [[nodiscard]] double det() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
};

/// Conjugate (or real) eigenvalue pair; lambda_plus carries Im >= 0.
struct EigenPair {
    std::complex<double> lambda_plus;
    std::complex<double> lambda_minus;
};

/// Polar view of a complex value, angle in degrees in (-180, 180].
struct Polar {
    double magnitude = 0.0;
    double angle_deg = 0.0;
};

[[nodiscard]] Polar to_polar(std::complex<double> z);

/// State matrix of the healthy line: a = [[-R/L, -1/L], [1/C, 0]], b = [1/L, 0].
[[nodiscard]] StateMatrix2 healthy_matrix(const LineParams& p);

/// State matrix with a constant resistance w to ground between R and L:
/// a = [[-RW/(L(R+W)), -1/L], [1/C, 0]], b = [W/(L(R+W)), 0].
[[nodiscard]] StateMatrix2 faulted_matrix(const LineParams& p, double w);

/// Roots of lambda^2 - tr*lambda + det = 0 via the numerically stable
/// quadratic (larger-magnitude root first, second as det/root).
[[nodiscard]] EigenPair eigenvalues_closed_form(const StateMatrix2& m);

/// Stable quadratic for complex coefficients; roots of x^2 + b*x + c = 0.
[[nodiscard]] std::array<std::complex<double>, 2> solve_quadratic(std::complex<double> b,
                                                                  std::complex<double> c);

}  // namespace hifd
