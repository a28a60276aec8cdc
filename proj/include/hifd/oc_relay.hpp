#pragma once

// Overcurrent relay baseline: pickup with margin over nominal, standard
// CT selection, tap in secondary amperes, and the multiple-of-pickup
// ratio M with trip iff M > 1. True-RMS over a one-cycle sliding window.

#include <cstddef>
#include <optional>
#include <vector>

#include "hifd/line_model.hpp"

namespace hifd {

struct CtRatio {
    double primary = 0.0;
    double secondary = 5.0;

    [[nodiscard]] double turns() const { return primary / secondary; }
};

struct OcSettings {
    double pickup = 0.0;  // ampere primary
    CtRatio ct;
    double tap = 0.0;     // ampere secondary
    double margin = 0.15; // fraction over nominal
};

struct OcEvaluation {
    double m = 0.0;  // multiple of pickup
    bool trip = false;
};

/// pickup = i_nominal * (1 + margin); CT is the smallest standard ratio
/// (50..300 : 5) whose primary covers the pickup; tap = pickup / turns.
[[nodiscard]] OcSettings derive_settings(const LineParams& p, double margin = 0.15);

/// M = i_secondary / tap; trips iff M > 1.
[[nodiscard]] OcEvaluation evaluate(double i_secondary_rms, const OcSettings& s);

/// One-cycle sliding true-RMS over point-on-wave samples.
class CycleRms {
public:
    CycleRms(double f_sim, double f_nominal);

    /// Returns the window RMS once a full cycle has been seen.
    std::optional<double> push(double sample);

private:
    std::vector<double> ring_;
    std::size_t count_ = 0;
    double sum_sq_ = 0.0;
};

}  // namespace hifd
