#include "hifd/oc_relay.hpp"

#include <array>
#include <cmath>

#include "hifd/errors.hpp"

namespace hifd {

OcSettings derive_settings(const LineParams& p, double margin) {
    if (margin <= 0.0) throw InvalidParameterError("margin must be > 0");
    validate(p);
    OcSettings s;
    s.margin = margin;
    s.pickup = p.i_nominal * (1.0 + margin);
    constexpr std::array<double, 6> kStandardCt{50, 100, 150, 200, 250, 300};
    s.ct = CtRatio{kStandardCt.back(), 5.0};
    for (double primary : kStandardCt) {
        if (primary >= s.pickup) {
            s.ct = CtRatio{primary, 5.0};
            break;
        }
    }
    s.tap = s.pickup / s.ct.turns();
    return s;
}

OcEvaluation evaluate(double i_secondary_rms, const OcSettings& s) {
    if (i_secondary_rms < 0.0) throw InvalidParameterError("relay current must be >= 0");
    if (s.tap <= 0.0) throw InvalidParameterError("tap must be > 0");
    const double m = i_secondary_rms / s.tap;
    return OcEvaluation{m, m > 1.0};
}

CycleRms::CycleRms(double f_sim, double f_nominal) {
    const double q = f_sim / f_nominal;
    const auto n = static_cast<std::size_t>(std::llround(q));
    if (n == 0 || std::abs(q - static_cast<double>(n)) > 1e-9)
        throw ConfigError("f_sim must be an integer multiple of f_nominal");
    ring_.assign(n, 0.0);
}

std::optional<double> CycleRms::push(double sample) {
    const std::size_t slot = count_ % ring_.size();
    sum_sq_ += sample * sample - ring_[slot] * ring_[slot];
    ring_[slot] = sample;
    ++count_;
    if (count_ % (ring_.size() * 64) == 0) {
        // periodic exact recompute to shed accumulated rounding
        sum_sq_ = 0.0;
        for (double v : ring_) sum_sq_ += v * v;
    }
    if (count_ < ring_.size()) return std::nullopt;
    return std::sqrt(std::max(0.0, sum_sq_) / static_cast<double>(ring_.size()));
}

}  // namespace hifd
