#include "hifd/hif_model.hpp"

#include <algorithm>
#include <cmath>

#include "hifd/errors.hpp"
#include "hifd/waveform_sim.hpp"

namespace hifd {

void validate(const HifParams& p) {
    auto check_bounds = [](const std::pair<double, double>& b, const char* which) {
        if (!(b.first > 0.0) || !(b.second >= b.first))
            throw InvalidParameterError(std::string(which) + ": need 0 < min <= max");
    };
    check_bounds(p.r_p_bounds, "r_p_bounds");
    check_bounds(p.r_n_bounds, "r_n_bounds");
    if (p.tau <= 0.0) throw InvalidParameterError("tau must be > 0");
    if (p.sigma_step < 0.0) throw InvalidParameterError("sigma_step must be >= 0");
    if (p.v_p < 0.0 || p.v_n < 0.0) throw InvalidParameterError("arc thresholds must be >= 0");
}

HifState::HifState(const HifParams& params) : params_(params), rng_(params.seed) {
    validate(params_);
    r_p_ = 0.5 * (params_.r_p_bounds.first + params_.r_p_bounds.second);
    r_n_ = 0.5 * (params_.r_n_bounds.first + params_.r_n_bounds.second);
}

void HifState::step_resistances(double t) {
    while (t >= next_update_) {
        const double dp = params_.sigma_step * gauss_(rng_);
        const double dn = params_.sigma_step * gauss_(rng_);
        if (params_.process == ResistanceProcess::kWalk) {
            r_p_ = std::clamp(r_p_ + dp, params_.r_p_bounds.first, params_.r_p_bounds.second);
            r_n_ = std::clamp(r_n_ + dn, params_.r_n_bounds.first, params_.r_n_bounds.second);
        } else {
            const double mid_p = 0.5 * (params_.r_p_bounds.first + params_.r_p_bounds.second);
            const double mid_n = 0.5 * (params_.r_n_bounds.first + params_.r_n_bounds.second);
            r_p_ = std::clamp(mid_p + dp, params_.r_p_bounds.first, params_.r_p_bounds.second);
            r_n_ = std::clamp(mid_n + dn, params_.r_n_bounds.first, params_.r_n_bounds.second);
        }
        next_update_ += params_.tau;
    }
}

int sgp(double i) { return i > 0.0 ? 1 : 0; }

int sgn_arc(double i) { return i > 0.0 ? 0 : -1; }

double fault_branch_voltage(double i, const HifState& state) {
    const HifParams& p = state.params();
    const int pos = sgp(i);
    return state.r_p() * i * pos + p.v_p * pos + state.r_n() * i * (1 - pos) +
           p.v_n * sgn_arc(i);
}

HifParams calibrate_to_target(const HifParams& params, double target_rms,
                              const LineParams& line, const LoadParams& load,
                              const CalibrationOptions& opts) {
    if (target_rms <= 0.0) throw InvalidParameterError("target_rms must be > 0");
    validate(params);
    validate(line);

    auto scaled = [&](double mult) {
        HifParams q = params;
        q.r_p_bounds = {params.r_p_bounds.first * mult, params.r_p_bounds.second * mult};
        q.r_n_bounds = {params.r_n_bounds.first * mult, params.r_n_bounds.second * mult};
        q.sigma_step = params.sigma_step * mult;
        return q;
    };

    // Steady-fault branch RMS from a short run with the fault held on.
    auto branch_rms = [&](double mult) {
        SimConfig cfg;
        cfg.line = line;
        cfg.load = load;
        cfg.load.profile = LoadProfile{};  // flat, nominal loading
        cfg.hif = scaled(mult);
        cfg.schedule = {FaultWindow{opts.settle_time, opts.eval_time + opts.settle_time}};
        cfg.f_sim = opts.f_sim;
        cfg.duration = 2.0 * opts.settle_time + opts.eval_time;
        double sum_sq = 0.0;
        std::size_t n = 0;
        const double t_begin = 2.0 * opts.settle_time;
        simulate_segment(cfg, [&](const WaveformFrame& f) {
            if (f.t >= t_begin) {
                sum_sq += f.i_fault * f.i_fault;
                ++n;
            }
        });
        return n ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
    };

    // Branch current falls monotonically with resistance, so bisect on a
    // log-spaced multiplier.
    double lo = opts.multiplier_min, hi = opts.multiplier_max;
    double rms_lo = branch_rms(lo), rms_hi = branch_rms(hi);
    if (!(rms_lo >= target_rms && target_rms >= rms_hi))
        throw CalibrationError("target fault RMS not bracketed by multiplier range");
    double mult = 1.0, rms = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        mult = std::sqrt(lo * hi);
        rms = branch_rms(mult);
        if (std::abs(rms - target_rms) <= opts.tolerance * target_rms) return scaled(mult);
        (rms > target_rms ? lo : hi) = mult;
    }
    if (std::abs(rms - target_rms) <= 0.15 * target_rms) return scaled(mult);
    throw CalibrationError("bisection did not reach the target fault RMS");
}

}  // namespace hifd
