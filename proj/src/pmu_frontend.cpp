#include "hifd/pmu_frontend.hpp"

#include <cmath>

#include "hifd/errors.hpp"

namespace hifd {

namespace {

std::size_t exact_ratio(double num, double den, const char* what) {
    const double q = num / den;
    const auto r = static_cast<std::size_t>(std::llround(q));
    if (r == 0 || std::abs(q - static_cast<double>(r)) > 1e-9)
        throw ConfigError(std::string("f_sim must be an integer multiple of ") + what);
    return r;
}

}  // namespace

PhasorExtractor::PhasorExtractor(const PmuConfig& cfg, double f_sim, double f_nominal)
    : cfg_(cfg), rng_(cfg.seed) {
    if (cfg.rate <= 0.0) throw ConfigError("reporting rate must be > 0");
    if (f_nominal <= 0.0) throw ConfigError("f_nominal must be > 0");
    cycle_len_ = exact_ratio(f_sim, f_nominal, "f_nominal");
    stride_ = exact_ratio(f_sim, cfg.rate, "the reporting rate");
    omega_ = 2.0 * kPi * f_nominal;
    ring_.resize(cycle_len_);
}

std::complex<double> PhasorExtractor::channel_dft(double WaveformFrame::* field) const {
    // Full-cycle DFT at the fundamental over the trailing cycle,
    // referenced to the absolute time base: sqrt(2)/N * sum x_j e^{-j w0 t_j}.
    std::complex<double> acc{0.0, 0.0};
    for (const WaveformFrame& f : ring_)
        acc += (f.*field) * std::polar(1.0, -omega_ * f.t);
    return std::sqrt(2.0) / static_cast<double>(cycle_len_) * acc;
}

std::complex<double> PhasorExtractor::add_noise(std::complex<double> clean, double scale) {
    const double sigma = std::abs(clean) * scale;
    return clean + std::complex<double>(sigma * gauss_(rng_), sigma * gauss_(rng_));
}

std::optional<PhasorSample> PhasorExtractor::push(const WaveformFrame& frame) {
    ring_[count_ % cycle_len_] = frame;
    ++count_;
    if (count_ < cycle_len_ || count_ % stride_ != 0) return std::nullopt;

    PhasorSample s;
    s.t = frame.t;
    s.rate = cfg_.rate;
    s.v_send = channel_dft(&WaveformFrame::v_send);
    s.i_send = channel_dft(&WaveformFrame::i_send);
    s.v_recv = channel_dft(&WaveformFrame::v_recv);
    s.i_recv = channel_dft(&WaveformFrame::i_recv);
    if (cfg_.snr_db) {
        const double scale = std::pow(10.0, -*cfg_.snr_db / 20.0);
        s.v_send = add_noise(s.v_send, scale);
        s.i_send = add_noise(s.i_send, scale);
        s.v_recv = add_noise(s.v_recv, scale);
        s.i_recv = add_noise(s.i_recv, scale);
    }
    return s;
}

std::vector<PhasorSample> extract_phasors(std::span<const WaveformFrame> frames,
                                          const PmuConfig& cfg, double f_sim,
                                          double f_nominal) {
    PhasorExtractor ex(cfg, f_sim, f_nominal);
    std::vector<PhasorSample> out;
    for (const WaveformFrame& f : frames)
        if (auto s = ex.push(f)) out.push_back(*s);
    return out;
}

}  // namespace hifd
