#pragma once

// Point-on-wave simulation of the monitored section:
//
//   source --R--(fault branch)--L--+--[C || load]--ground
//                                  |
//                               receiving end
//
// Trapezoidal integration; the fault branch is the piecewise-linear arc
// model solved exactly per step once its conduction branch is fixed.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "hifd/hif_model.hpp"
#include "hifd/line_model.hpp"

namespace hifd {

/// 24 hourly multipliers applied to the base load admittance.
struct LoadProfile {
    enum class Interp { kStep, kLinear };

    std::array<double, 24> multipliers{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                                       1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    Interp mode = Interp::kStep;

    /// Multiplier at fractional hour position (wraps past 24).
    [[nodiscard]] double at(double hour) const;
};

/// Constant-impedance shunt load at the receiving end, modeled as a
/// parallel R-L so the displacement factor survives admittance scaling.
struct LoadParams {
    double base_impedance = 0.0;  // ohm at multiplier 1
    double power_factor = 1.0;    // lagging, in (0, 1]
    LoadProfile profile;

    [[nodiscard]] double conductance() const;                  // siemens at multiplier 1
    [[nodiscard]] double inductive_susceptance() const;        // siemens at multiplier 1
};

struct FaultWindow {
    double start = 0.0;     // second
    double duration = 0.0;  // second

    [[nodiscard]] double end() const { return start + duration; }
    [[nodiscard]] bool contains(double t) const { return t >= start && t < end(); }
};

struct SimConfig {
    LineParams line;
    LoadParams load;
    std::optional<HifParams> hif;      // absent -> no fault branch at all
    std::vector<FaultWindow> schedule; // windows where the branch is armed
    double f_sim = 7680.0;             // hertz, >= 64 samples per nominal cycle
    double duration = 0.0;             // second
    double hour_window = 10.0;         // seconds of simulated time per profile hour
};

struct WaveformFrame {
    double t = 0.0;
    double v_send = 0.0;
    double i_send = 0.0;
    double v_recv = 0.0;
    double i_recv = 0.0;
    bool fault_active = false;
    // diagnostics, not part of the CSV contract
    double i_fault = 0.0;
    double v_mid = 0.0;
};

using FrameSink = std::function<void(const WaveformFrame&)>;

/// Runs the simulation, pushing one frame per step (t = h, 2h, ...).
/// Throws InstabilityError when a state leaves 1e9 x nominal scale.
void simulate_segment(const SimConfig& cfg, const FrameSink& sink);

/// Steady-state phasor solution of the same network at the fundamental,
/// with the fault branch open. Used as the analytic cross-check for the
/// integrator and the PMU front end.
struct SteadyStatePhasors {
    std::complex<double> v_send, i_send, v_recv, i_recv;  // RMS referenced to cos(w0 t)
};
[[nodiscard]] SteadyStatePhasors steady_state_phasors(const LineParams& line,
                                                      const LoadParams& load,
                                                      double multiplier);

struct CalibrationOptions {
    double multiplier_min = 1e-3;
    double multiplier_max = 1e3;
    double tolerance = 0.02;   // relative, on the branch RMS
    int max_iterations = 48;
    double f_sim = 7680.0;
    double settle_time = 0.25;  // second, discarded before measuring
    double eval_time = 0.5;     // second of steady fault used for the RMS
};

/// Scales both resistance bounds by one multiplier until the simulated
/// steady-fault branch RMS hits target_rms. Throws CalibrationError when
/// the multiplier range cannot reach the target.
[[nodiscard]] HifParams calibrate_to_target(const HifParams& params, double target_rms,
                                            const LineParams& line, const LoadParams& load,
                                            const CalibrationOptions& opts = {});

}  // namespace hifd
