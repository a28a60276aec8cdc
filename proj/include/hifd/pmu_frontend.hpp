#pragma once

// Fixed-frequency full-cycle DFT phasors at PMU reporting rates, with
// optional per-channel complex Gaussian noise at a configured SNR. This
// is the boundary a deployment would replace with live PMU feeds.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hifd/waveform_sim.hpp"

namespace hifd {

struct PhasorSample {
    double t = 0.0;  // reporting instant (end of the trailing cycle)
    std::complex<double> v_send, i_send, v_recv, i_recv;  // RMS, ref cos(w0 t)
    double rate = 0.0;  // hertz
};

struct PmuConfig {
    double rate = 30.0;               // hertz
    std::optional<double> snr_db;     // absent -> noise-free
    std::uint64_t seed = 0;
};

/// Streaming extractor: feed frames in order, get a phasor sample on
/// every reporting instant once a full nominal cycle is buffered.
class PhasorExtractor {
public:
    PhasorExtractor(const PmuConfig& cfg, double f_sim, double f_nominal);

    std::optional<PhasorSample> push(const WaveformFrame& frame);

    [[nodiscard]] std::size_t samples_per_cycle() const { return cycle_len_; }
    [[nodiscard]] std::size_t stride() const { return stride_; }

private:
    PmuConfig cfg_;
    double omega_;
    std::size_t cycle_len_;
    std::size_t stride_;
    std::size_t count_ = 0;
    std::vector<WaveformFrame> ring_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};

    std::complex<double> channel_dft(double WaveformFrame::* field) const;
    std::complex<double> add_noise(std::complex<double> clean, double scale);
};

/// Batch form over a frame vector; convenience for tests and dumps.
[[nodiscard]] std::vector<PhasorSample> extract_phasors(std::span<const WaveformFrame> frames,
                                                        const PmuConfig& cfg, double f_sim,
                                                        double f_nominal);

}  // namespace hifd
