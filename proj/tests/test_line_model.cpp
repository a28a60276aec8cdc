#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>

#include "hifd/errors.hpp"
#include "hifd/line_model.hpp"

using namespace hifd;

namespace {

LineParams params(double r, double l, double c) {
    LineParams p;
    p.r_series = r;
    p.l_series = l;
    p.c_shunt = c;
    p.v_nominal = 1000.0;
    p.i_nominal = 100.0;
    return p;
}

// independent oracle: general-purpose eigensolver on the dense 2x2
EigenPair brute_force_eigen(const StateMatrix2& m) {
    Eigen::Matrix2d a;
    a << m.a[0][0], m.a[0][1], m.a[1][0], m.a[1][1];
    Eigen::EigenSolver<Eigen::Matrix2d> solver(a);
    std::complex<double> e0 = solver.eigenvalues()(0);
    std::complex<double> e1 = solver.eigenvalues()(1);
    if (e0.imag() < e1.imag()) std::swap(e0, e1);
    return EigenPair{e0, e1};
}

}  // namespace

TEST_CASE("healthy matrix from direct substitution") {
    const StateMatrix2 m = healthy_matrix(params(1.0, 1.0, 1.0));
    CHECK(m.a[0][0] == -1.0);
    CHECK(m.a[0][1] == -1.0);
    CHECK(m.a[1][0] == 1.0);
    CHECK(m.a[1][1] == 0.0);
    CHECK(m.b[0] == 1.0);
    CHECK(m.b[1] == 0.0);

    const StateMatrix2 lossless = healthy_matrix(params(0.0, 1.0, 1.0));
    CHECK(lossless.a[0][0] == 0.0);

    const StateMatrix2 line = healthy_matrix(params(0.5, 2e-3, 1e-6));
    CHECK(line.a[0][0] == doctest::Approx(-250.0).epsilon(1e-12));
    CHECK(line.a[0][1] == doctest::Approx(-500.0).epsilon(1e-12));
    CHECK(line.a[1][0] == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(line.a[1][1] == 0.0);
}

TEST_CASE("healthy matrix rejects non-positive L and C") {
    CHECK_THROWS_AS((void)healthy_matrix(params(1.0, 0.0, 1.0)), InvalidParameterError);
    CHECK_THROWS_AS((void)healthy_matrix(params(1.0, 1.0, -2.0)), InvalidParameterError);
}

TEST_CASE("faulted matrix limits") {
    const LineParams p = params(1.0, 1.0, 1.0);

    SUBCASE("large-W sentinel recovers the healthy matrix") {
        const StateMatrix2 healthy = healthy_matrix(p);
        const StateMatrix2 faulted = faulted_matrix(p, kOpenFaultOhm);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double ref = healthy.a[i][j];
                const double tol = 1e-6 * std::max(1.0, std::abs(ref));
                CHECK(std::abs(faulted.a[i][j] - ref) <= tol);
            }
        CHECK(std::abs(faulted.b[0] - healthy.b[0]) <= 1e-6 * healthy.b[0]);
    }

    SUBCASE("bolted fault isolates the source path") {
        const StateMatrix2 bolted = faulted_matrix(p, 0.0);
        CHECK(bolted.a[0][0] == 0.0);
        CHECK(bolted.b[0] == 0.0);
    }

    SUBCASE("equal divider") {
        const StateMatrix2 m = faulted_matrix(p, 1.0);
        CHECK(m.a[0][0] == doctest::Approx(-0.5));
        CHECK(m.b[0] == doctest::Approx(0.5));
    }

    SUBCASE("degenerate divider rejected") {
        const LineParams lossless = params(0.0, 1.0, 1.0);
        CHECK_THROWS_AS((void)faulted_matrix(lossless, 0.0), InvalidParameterError);
        CHECK_THROWS_AS((void)faulted_matrix(p, -1.0), InvalidParameterError);
    }
}

TEST_CASE("closed-form eigenvalues on known matrices") {
    SUBCASE("lossless LC gives +-j") {
        StateMatrix2 m;
        m.a = {{{0.0, -1.0}, {1.0, 0.0}}};
        const EigenPair e = eigenvalues_closed_form(m);
        CHECK(e.lambda_plus.real() == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
        CHECK(e.lambda_plus.imag() == doctest::Approx(1.0));
        CHECK(e.lambda_minus.imag() == doctest::Approx(-1.0));
    }

    SUBCASE("unit RLC") {
        StateMatrix2 m;
        m.a = {{{-1.0, -1.0}, {1.0, 0.0}}};
        const EigenPair e = eigenvalues_closed_form(m);
        CHECK(e.lambda_plus.real() == doctest::Approx(-0.5).epsilon(1e-9));
        CHECK(e.lambda_plus.imag() == doctest::Approx(0.8660254).epsilon(1e-6));
    }

    SUBCASE("realistic line, checked against the quadratic by hand") {
        const EigenPair e = eigenvalues_closed_form(healthy_matrix(params(0.5, 2e-3, 1e-6)));
        // lambda^2 + 250 lambda + 5e8 = 0 -> -125 +- j sqrt(5e8 - 125^2)
        CHECK(e.lambda_minus.real() == doctest::Approx(-125.0).epsilon(1e-9));
        CHECK(e.lambda_minus.imag() == doctest::Approx(-22360.3304).epsilon(1e-6));
    }
}

TEST_CASE("closed form matches a brute-force eigensolver on 1000 draws") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double r = (k % 10 == 0) ? 0.0 : std::pow(10.0, -3.0 + 6.0 * u(rng));
        const double l = std::pow(10.0, -5.0 + 5.0 * u(rng));
        const double c = std::pow(10.0, -9.0 + 6.0 * u(rng));
        const LineParams p = params(r, l, c);
        const StateMatrix2 m =
            (k % 3 == 0) ? faulted_matrix(p, std::pow(10.0, 6.0 * u(rng))) : healthy_matrix(p);
        const EigenPair cf = eigenvalues_closed_form(m);
        const EigenPair bf = brute_force_eigen(m);
        const double scale = std::max(std::abs(bf.lambda_plus), 1e-30);
        worst = std::max(worst, std::abs(cf.lambda_plus - bf.lambda_plus) / scale);
        worst = std::max(worst, std::abs(cf.lambda_minus - bf.lambda_minus) / scale);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("passivity: healthy eigenvalues sit in the closed left half plane") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double r = (k % 7 == 0) ? 0.0 : std::pow(10.0, -2.0 + 5.0 * u(rng));
        const double l = std::pow(10.0, -5.0 + 5.0 * u(rng));
        const double c = std::pow(10.0, -9.0 + 6.0 * u(rng));
        const EigenPair e = eigenvalues_closed_form(healthy_matrix(params(r, l, c)));
        const double slack = 1e-9 * std::abs(e.lambda_plus);
        CHECK(e.lambda_plus.real() <= slack);
        CHECK(e.lambda_minus.real() <= slack);
    }
}

TEST_CASE("healthy determinant is exactly 1/(LC), independent of R") {
    for (double r : {0.0, 0.5, 17.0, 4e3}) {
        const LineParams p = params(r, 3.7e-3, 2.2e-7);
        const StateMatrix2 m = healthy_matrix(p);
        CHECK(m.det() == (1.0 / p.l_series) * (1.0 / p.c_shunt));
    }
}

TEST_CASE("faulted (0,0) entry decreases monotonically from 0 to -R/L") {
    const LineParams p = params(2.7, 0.02149, 4.2e-7);
    double prev = 0.0;
    CHECK(faulted_matrix(p, 0.0).a[0][0] == 0.0);
    for (double w = 1e-3; w < 1e13; w *= 10.0) {
        const double a00 = faulted_matrix(p, w).a[0][0];
        CHECK(a00 <= prev);
        CHECK(a00 >= -p.r_series / p.l_series);
        prev = a00;
    }
}

TEST_CASE("polar angle lands in (-180, 180]") {
    CHECK(to_polar({-1.0, 0.0}).angle_deg == doctest::Approx(180.0));
    CHECK(to_polar({0.0, -1.0}).angle_deg == doctest::Approx(-90.0));
    CHECK(to_polar({1.0, 0.0}).angle_deg == doctest::Approx(0.0));
    CHECK(to_polar({3.0, 4.0}).magnitude == doctest::Approx(5.0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const Polar pol = to_polar({u(rng), u(rng)});
        CHECK(pol.angle_deg > -180.0 - 1e-12);
        CHECK(pol.angle_deg <= 180.0 + 1e-12);
    }
}
