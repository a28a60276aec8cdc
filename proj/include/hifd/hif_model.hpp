#pragma once

// Anti-parallel source-diode high-impedance fault branch: separate
// positive/negative half-cycle resistances walking inside bounds, plus
// arc threshold voltages. The branch produces the DC offset and the
// even/odd harmonics characteristic of arcing faults.

#include <cstdint>
#include <random>
#include <utility>

#include "hifd/line_model.hpp"

namespace hifd {

enum class ResistanceProcess {
    kWalk,  // clamped Gaussian random walk (default)
    kIid    // clamped Gaussian redraw around the bounds midpoint
};

struct HifParams {
    std::pair<double, double> r_p_bounds{0.0, 0.0};  // ohm, positive half-cycle
    std::pair<double, double> r_n_bounds{0.0, 0.0};  // ohm, negative half-cycle
    double v_p = 0.0;        // volt, positive arc threshold
    double v_n = 0.0;        // volt, negative arc threshold
    double tau = 2e-3;       // second, resistance update interval
    double sigma_step = 0.0; // ohm, std of one Gaussian step
    std::uint64_t seed = 0;
    ResistanceProcess process = ResistanceProcess::kWalk;
};

/// Throws InvalidParameterError unless all HifParams invariants hold.
void validate(const HifParams& p);

/// Evolving state of the two resistance processes. Owned by one
/// simulation run; deterministic for a given seed.
class HifState {
public:
    explicit HifState(const HifParams& params);

    /// Advances the resistance processes across every update instant
    /// at or before t. Identity when t < next_update_time.
    void step_resistances(double t);

    [[nodiscard]] double r_p() const { return r_p_; }
    [[nodiscard]] double r_n() const { return r_n_; }
    [[nodiscard]] double next_update_time() const { return next_update_; }
    [[nodiscard]] const HifParams& params() const { return params_; }

private:
    HifParams params_;
    double r_p_;
    double r_n_;
    double next_update_ = 0.0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// 1 when i > 0, else 0 (positive half-cycle indicator).
[[nodiscard]] int sgp(double i);

/// 0 when i > 0, else -1 (negative half-cycle indicator).
[[nodiscard]] int sgn_arc(double i);

/// Branch voltage for branch current i:
///   R_p*i*sgp(i) + v_p*sgp(i) + R_n*i*(1 - sgp(i)) + v_n*sgn_arc(i).
[[nodiscard]] double fault_branch_voltage(double i, const HifState& state);

}  // namespace hifd
