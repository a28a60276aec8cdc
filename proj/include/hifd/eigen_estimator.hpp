#pragma once

// Per-window line eigenvalue estimates from phasor pairs. Two strategies:
//  - impedance: apparent impedance (v_send - v_recv)/i_send averaged over
//    the window, mapped through the healthy line model (default);
//  - discrete-ls: one-step least-squares fit of the phasor state map,
//    eigenvalues mapped by rate * log(lambda_d) (or rate * lambda_d in
//    raw report mode).

#include <complex>
#include <deque>
#include <optional>
#include <span>

#include "hifd/line_model.hpp"
#include "hifd/pmu_frontend.hpp"

namespace hifd {

enum class EstimatorStrategy { kImpedance, kDiscreteLs };

[[nodiscard]] const char* to_string(EstimatorStrategy s);

struct EstimatorConfig {
    EstimatorStrategy strategy = EstimatorStrategy::kImpedance;
    int window_len = 10;  // phasor samples per estimate
    int stride = 1;       // samples between estimates
    bool raw_discrete = false;
    double min_current_frac = 1e-3;  // |i_send| floor as a fraction of i_nominal
    double min_inductance = 1e-6;    // henry, floor applied to Im(Z)/w0
    double max_condition = 1e10;     // regressor condition limit
};

struct EigenSample {
    double t = 0.0;
    std::complex<double> lambda;  // Im <= 0 conjugate representative
    Polar polar;
    EstimatorStrategy strategy = EstimatorStrategy::kImpedance;
};

enum class WithholdReason { kNone, kLowCurrent, kRankDeficient };

/// Withheld estimates carry a reason and no sample; they are recorded as
/// gaps, never fabricated values.
struct EstimateOutcome {
    std::optional<EigenSample> sample;
    WithholdReason reason = WithholdReason::kNone;

    [[nodiscard]] bool withheld() const { return !sample.has_value(); }
};

[[nodiscard]] EstimateOutcome estimate_impedance(std::span<const PhasorSample> window,
                                                 const LineParams& p,
                                                 const EstimatorConfig& cfg);

[[nodiscard]] EstimateOutcome estimate_discrete_ls(std::span<const PhasorSample> window,
                                                   const LineParams& p, double rate,
                                                   const EstimatorConfig& cfg);

/// Sliding-window driver; emits one outcome per stride once the window
/// is full. Stateless apart from the window buffer.
class EigenEstimator {
public:
    EigenEstimator(const EstimatorConfig& cfg, const LineParams& line);

    std::optional<EstimateOutcome> push(const PhasorSample& sample);

private:
    EstimatorConfig cfg_;
    LineParams line_;
    std::deque<PhasorSample> window_;
    int since_emit_ = 0;
};

}  // namespace hifd
