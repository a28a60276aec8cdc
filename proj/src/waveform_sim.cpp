#include "hifd/waveform_sim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "hifd/errors.hpp"

namespace hifd {

double LoadProfile::at(double hour) const {
    if (!(hour >= 0.0)) hour = 0.0;
    const double wrapped = std::fmod(hour, 24.0);
    const int h0 = static_cast<int>(wrapped);
    if (mode == Interp::kStep) return multipliers[static_cast<std::size_t>(h0)];
    const int h1 = (h0 + 1) % 24;
    const double frac = wrapped - h0;
    return multipliers[static_cast<std::size_t>(h0)] * (1.0 - frac) +
           multipliers[static_cast<std::size_t>(h1)] * frac;
}

double LoadParams::conductance() const { return power_factor / base_impedance; }

double LoadParams::inductive_susceptance() const {
    return std::sqrt(std::max(0.0, 1.0 - power_factor * power_factor)) / base_impedance;
}

namespace {

void validate_load(const LoadParams& load) {
    if (load.base_impedance <= 0.0)
        throw InvalidParameterError("load base_impedance must be > 0");
    if (!(load.power_factor > 0.0 && load.power_factor <= 1.0))
        throw InvalidParameterError("load power_factor must be in (0, 1]");
    for (double m : load.profile.multipliers)
        if (!(m > 0.0)) throw InvalidParameterError("load profile multipliers must be > 0");
}

enum class Branch { kOpen, kPos, kNeg };

struct BranchCoeffs {
    double k_r;     // effective series resistance seen from the source
    double u_gain;  // input gain into di/dt numerator
    double u_bias;  // constant term from the arc threshold
};

// Node between R and L: Thevenin voltage vth = vs - R*iL behind R.
// Conduction: pos iff vth > v_p, neg iff vth < -v_n, open otherwise.
BranchCoeffs branch_coeffs(Branch b, const LineParams& line, const HifState* hif) {
    const double r = line.r_series;
    switch (b) {
        case Branch::kPos: {
            const double rf = hif->r_p(), vth = hif->params().v_p;
            return {r * rf / (r + rf), rf / (r + rf), vth * r / (r + rf)};
        }
        case Branch::kNeg: {
            const double rf = hif->r_n(), vth = -hif->params().v_n;
            return {r * rf / (r + rf), rf / (r + rf), vth * r / (r + rf)};
        }
        case Branch::kOpen:
        default:
            return {r, 1.0, 0.0};
    }
}

bool branch_consistent(Branch b, double vth_b, bool active, const HifState* hif) {
    if (!active || hif == nullptr) return b == Branch::kOpen;
    const double vp = hif->params().v_p, vn = hif->params().v_n;
    switch (b) {
        case Branch::kPos: return vth_b > vp;
        case Branch::kNeg: return vth_b < -vn;
        case Branch::kOpen:
        default: return vth_b <= vp && vth_b >= -vn;
    }
}

double branch_current(Branch b, double vth_b, const LineParams& line, const HifState* hif) {
    if (b == Branch::kOpen || hif == nullptr) return 0.0;
    const double rf = (b == Branch::kPos) ? hif->r_p() : hif->r_n();
    const double vth = (b == Branch::kPos) ? hif->params().v_p : -hif->params().v_n;
    return (vth_b - vth) / (line.r_series + rf);
}

}  // namespace

SteadyStatePhasors steady_state_phasors(const LineParams& line, const LoadParams& load,
                                        double multiplier) {
    using cd = std::complex<double>;
    const double w0 = line.omega_nominal();
    const cd y_load = multiplier * cd(load.conductance(), -load.inductive_susceptance());
    const cd y_recv = y_load + cd(0.0, w0 * line.c_shunt);
    const cd z_line(line.r_series, w0 * line.l_series);
    const cd z_total = z_line + 1.0 / y_recv;
    const cd v_s(line.v_nominal, 0.0);
    const cd i_s = v_s / z_total;
    const cd v_r = i_s / y_recv;
    return SteadyStatePhasors{v_s, i_s, v_r, i_s - v_r * cd(0.0, w0 * line.c_shunt)};
}

void simulate_segment(const SimConfig& cfg, const FrameSink& sink) {
    validate(cfg.line);
    validate_load(cfg.load);
    if (cfg.duration <= 0.0) throw InvalidParameterError("duration must be > 0");
    if (cfg.hour_window <= 0.0) throw InvalidParameterError("hour_window must be > 0");
    if (cfg.f_sim < 64.0 * cfg.line.f_nominal)
        throw InvalidParameterError("f_sim must give >= 64 samples per nominal cycle");

    std::optional<HifState> hif_state;
    if (cfg.hif) hif_state.emplace(*cfg.hif);
    HifState* hif = hif_state ? &*hif_state : nullptr;

    const double h = 1.0 / cfg.f_sim;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration * cfg.f_sim));
    const double w0 = cfg.line.omega_nominal();
    const double v_pk = cfg.line.v_nominal * std::sqrt(2.0);
    const double g0 = cfg.load.conductance();
    const double b0 = cfg.load.inductive_susceptance();
    const double l = cfg.line.l_series, c = cfg.line.c_shunt, r = cfg.line.r_series;

    const double i_limit = 1e9 * cfg.line.i_nominal * std::sqrt(2.0);
    const double v_limit = 1e9 * cfg.line.v_nominal * std::sqrt(2.0) + 1e9;

    auto source = [&](double t) { return v_pk * std::cos(w0 * t); };
    auto fault_active = [&](double t) {
        if (!hif) return false;
        for (const FaultWindow& fw : cfg.schedule)
            if (fw.contains(t)) return true;
        return false;
    };

    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;

    auto system_at = [&](Branch b, double t, Mat3& a, Vec3& g) {
        const BranchCoeffs bc = branch_coeffs(b, cfg.line, hif);
        const double mult = cfg.load.profile.at(t / cfg.hour_window);
        a.setZero();
        a(0, 0) = -bc.k_r / l;
        a(0, 1) = -1.0 / l;
        a(1, 0) = 1.0 / c;
        a(1, 1) = -g0 * mult / c;
        a(1, 2) = -1.0 / c;
        a(2, 1) = w0 * b0 * mult;
        g = Vec3((bc.u_gain * source(t) + bc.u_bias) / l, 0.0, 0.0);
    };

    Vec3 x = Vec3::Zero();
    Branch branch = Branch::kOpen;
    Mat3 a0;
    Vec3 g0v;
    system_at(branch, 0.0, a0, g0v);
    Vec3 f0 = a0 * x + g0v;

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t1 = static_cast<double>(k + 1) * h;
        if (hif) hif->step_resistances(t1);
        const bool active = fault_active(t1);

        const Branch order[4] = {branch, Branch::kPos, Branch::kNeg, Branch::kOpen};
        Vec3 x1;
        Branch b1 = Branch::kOpen;
        Mat3 a1;
        Vec3 g1;
        bool solved = false;
        for (Branch cand : order) {
            if (!active && cand != Branch::kOpen) continue;
            system_at(cand, t1, a1, g1);
            const Mat3 m = Mat3::Identity() - 0.5 * h * a1;
            const Vec3 rhs = x + 0.5 * h * f0 + 0.5 * h * g1;
            x1 = m.partialPivLu().solve(rhs);
            const double vth_b = source(t1) - r * x1(0);
            if (branch_consistent(cand, vth_b, active, hif)) {
                b1 = cand;
                solved = true;
                break;
            }
        }
        if (!solved) {
            // fall back to the open branch; the characteristic is monotone
            // so this only happens at exact threshold crossings
            system_at(Branch::kOpen, t1, a1, g1);
            const Mat3 m = Mat3::Identity() - 0.5 * h * a1;
            x1 = m.partialPivLu().solve(x + 0.5 * h * f0 + 0.5 * h * g1);
            b1 = Branch::kOpen;
        }

        if (!x1.allFinite() || std::abs(x1(0)) > i_limit || std::abs(x1(1)) > v_limit ||
            std::abs(x1(2)) > i_limit)
            throw InstabilityError("state exceeded 1e9 x nominal; check parameters");

        const double vth_b = source(t1) - r * x1(0);
        const double i_f = branch_current(b1, vth_b, cfg.line, hif);
        const double mult1 = cfg.load.profile.at(t1 / cfg.hour_window);

        WaveformFrame frame;
        frame.t = t1;
        frame.v_send = source(t1);
        frame.i_send = x1(0) + i_f;
        frame.v_recv = x1(1);
        frame.i_recv = g0 * mult1 * x1(1) + x1(2);
        frame.fault_active = active;
        frame.i_fault = i_f;
        frame.v_mid = frame.v_send - r * frame.i_send;
        sink(frame);

        f0 = a1 * x1 + g1;
        x = x1;
        branch = b1;
    }
}

}  // namespace hifd
