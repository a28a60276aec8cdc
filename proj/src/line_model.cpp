#include "hifd/line_model.hpp"

#include <cmath>

#include "hifd/errors.hpp"

namespace hifd {

void validate(const LineParams& p) {
    if (p.r_series < 0.0) throw InvalidParameterError("r_series must be >= 0");
    if (p.l_series <= 0.0) throw InvalidParameterError("l_series must be > 0");
    if (p.c_shunt <= 0.0) throw InvalidParameterError("c_shunt must be > 0");
    if (p.f_nominal <= 0.0) throw InvalidParameterError("f_nominal must be > 0");
    if (p.i_nominal <= 0.0) throw InvalidParameterError("i_nominal must be > 0");
}

Polar to_polar(std::complex<double> z) {
    // std::arg returns (-pi, pi], which maps onto (-180, 180] directly.
    return Polar{std::abs(z), std::arg(z) * 180.0 / kPi};
}

StateMatrix2 healthy_matrix(const LineParams& p) {
    if (p.l_series <= 0.0) throw InvalidParameterError("healthy_matrix: l_series must be > 0");
    if (p.c_shunt <= 0.0) throw InvalidParameterError("healthy_matrix: c_shunt must be > 0");
    StateMatrix2 m;
    m.a[0][0] = -p.r_series / p.l_series;
    m.a[0][1] = -1.0 / p.l_series;
    m.a[1][0] = 1.0 / p.c_shunt;
    m.a[1][1] = 0.0;
    m.b = {1.0 / p.l_series, 0.0};
    return m;
}

StateMatrix2 faulted_matrix(const LineParams& p, double w) {
    if (p.l_series <= 0.0) throw InvalidParameterError("faulted_matrix: l_series must be > 0");
    if (p.c_shunt <= 0.0) throw InvalidParameterError("faulted_matrix: c_shunt must be > 0");
    if (w < 0.0) throw InvalidParameterError("faulted_matrix: fault resistance must be >= 0");
    const double divider = p.r_series + w;
    if (divider == 0.0) throw InvalidParameterError("faulted_matrix: R + W = 0 is degenerate");
    StateMatrix2 m;
    m.a[0][0] = -(p.r_series * w) / (p.l_series * divider);
    m.a[0][1] = -1.0 / p.l_series;
    m.a[1][0] = 1.0 / p.c_shunt;
    m.a[1][1] = 0.0;
    m.b = {w / (p.l_series * divider), 0.0};
    return m;
}

std::array<std::complex<double>, 2> solve_quadratic(std::complex<double> b,
                                                    std::complex<double> c) {
    using cd = std::complex<double>;
    const cd disc = b * b - 4.0 * c;
    const cd sq = std::sqrt(disc);
    // Pick the sign that avoids cancellation in b +/- sq.
    const cd q = (std::abs(b + sq) >= std::abs(b - sq)) ? (-0.5 * (b + sq)) : (-0.5 * (b - sq));
    if (q == cd(0.0, 0.0)) return {cd(0.0, 0.0), cd(0.0, 0.0)};
    return {q, c / q};
}

EigenPair eigenvalues_closed_form(const StateMatrix2& m) {
    // lambda^2 - tr*lambda + det = 0, with real coefficients. R/L and
    // 1/(LC) differ by orders of magnitude, so the direct formula with
    // the cancellation-free root pairing is required.
    const double tr = m.trace();
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;
    std::complex<double> r1, r2;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * ((-tr) + std::copysign(sq, -tr));
        if (q == 0.0) {
            r1 = r2 = 0.0;
        } else {
            r1 = q;
            r2 = det / q;
        }
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        r1 = {0.5 * tr, im};
        r2 = {0.5 * tr, -im};
    }
    if (r1.imag() < r2.imag()) std::swap(r1, r2);
    return EigenPair{r1, r2};
}

}  // namespace hifd
