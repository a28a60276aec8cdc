#include "hifd/eigen_estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hifd/errors.hpp"

namespace hifd {

const char* to_string(EstimatorStrategy s) {
    return s == EstimatorStrategy::kImpedance ? "impedance" : "discrete-ls";
}

namespace {

void validate(const EstimatorConfig& cfg) {
    const int min_window = cfg.strategy == EstimatorStrategy::kDiscreteLs ? 4 : 1;
    if (cfg.window_len < min_window)
        throw InvalidParameterError("window_len too small for the chosen strategy");
    if (cfg.stride < 1) throw InvalidParameterError("stride must be >= 1");
}

// Among the two mapped eigenvalues, report the Im <= 0 representative;
// break ties toward the larger magnitude.
std::complex<double> pick_representative(std::complex<double> a, std::complex<double> b) {
    const bool a_ok = a.imag() <= 0.0, b_ok = b.imag() <= 0.0;
    if (a_ok != b_ok) return a_ok ? a : b;
    if (a_ok) return std::abs(a) >= std::abs(b) ? a : b;
    return a.imag() <= b.imag() ? a : b;
}

EigenSample make_sample(double t, std::complex<double> lambda, EstimatorStrategy strategy) {
    return EigenSample{t, lambda, to_polar(lambda), strategy};
}

}  // namespace

EstimateOutcome estimate_impedance(std::span<const PhasorSample> window, const LineParams& p,
                                   const EstimatorConfig& cfg) {
    if (window.empty()) throw InvalidParameterError("estimate_impedance: empty window");
    const double floor = cfg.min_current_frac * p.i_nominal;
    for (const PhasorSample& s : window)
        if (std::abs(s.i_send) < floor) return {std::nullopt, WithholdReason::kLowCurrent};

    std::complex<double> z{0.0, 0.0};
    for (const PhasorSample& s : window) z += (s.v_send - s.v_recv) / s.i_send;
    z /= static_cast<double>(window.size());

    const double w0 = p.omega_nominal();
    LineParams fitted = p;
    fitted.r_series = std::max(z.real(), 0.0);
    fitted.l_series = std::max(z.imag() / w0, cfg.min_inductance);
    const EigenPair eig = eigenvalues_closed_form(healthy_matrix(fitted));
    return {make_sample(window.back().t, eig.lambda_minus, EstimatorStrategy::kImpedance),
            WithholdReason::kNone};
}

EstimateOutcome estimate_discrete_ls(std::span<const PhasorSample> window, const LineParams&,
                                     double rate, const EstimatorConfig& cfg) {
    using cd = std::complex<double>;
    const auto n = static_cast<Eigen::Index>(window.size());
    if (n < 4) throw InvalidParameterError("estimate_discrete_ls: need >= 4 samples");

    // One-step map on the state proxies x = (i_send, v_recv), input v_send.
    Eigen::MatrixXcd regs(n - 1, 3);
    Eigen::MatrixXcd next(n - 1, 2);
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        const PhasorSample& s = window[static_cast<std::size_t>(k)];
        const PhasorSample& s1 = window[static_cast<std::size_t>(k + 1)];
        regs(k, 0) = s.i_send;
        regs(k, 1) = s.v_recv;
        regs(k, 2) = s.v_send;
        next(k, 0) = s1.i_send;
        next(k, 1) = s1.v_recv;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(regs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > cfg.max_condition)
        return {std::nullopt, WithholdReason::kRankDeficient};

    const Eigen::MatrixXcd coeffs = svd.solve(next);  // 3x2, columns per output
    const cd tr = coeffs(0, 0) + coeffs(1, 1);
    const cd det = coeffs(0, 0) * coeffs(1, 1) - coeffs(1, 0) * coeffs(0, 1);
    const auto roots = solve_quadratic(-tr, det);

    auto map = [&](cd lam_d) -> std::optional<cd> {
        if (cfg.raw_discrete) return rate * lam_d;
        if (std::abs(lam_d) < 1e-300) return std::nullopt;  // log undefined
        return rate * std::log(lam_d);
    };
    const auto m0 = map(roots[0]);
    const auto m1 = map(roots[1]);
    if (!m0 && !m1) return {std::nullopt, WithholdReason::kRankDeficient};
    const cd lambda = (m0 && m1) ? pick_representative(*m0, *m1) : (m0 ? *m0 : *m1);
    return {make_sample(window.back().t, lambda, EstimatorStrategy::kDiscreteLs),
            WithholdReason::kNone};
}

EigenEstimator::EigenEstimator(const EstimatorConfig& cfg, const LineParams& line)
    : cfg_(cfg), line_(line) {
    validate(cfg_);
}

std::optional<EstimateOutcome> EigenEstimator::push(const PhasorSample& sample) {
    window_.push_back(sample);
    if (window_.size() > static_cast<std::size_t>(cfg_.window_len)) window_.pop_front();
    if (window_.size() < static_cast<std::size_t>(cfg_.window_len)) return std::nullopt;
    if (++since_emit_ < cfg_.stride) return std::nullopt;
    since_emit_ = 0;

    std::vector<PhasorSample> w(window_.begin(), window_.end());
    if (cfg_.strategy == EstimatorStrategy::kImpedance)
        return estimate_impedance(w, line_, cfg_);
    return estimate_discrete_ls(w, line_, sample.rate, cfg_);
}

}  // namespace hifd
