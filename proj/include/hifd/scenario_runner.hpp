#pragma once

// End-to-end experiment orchestration: simulation -> phasors ->
// eigenvalues -> zone detection, with the overcurrent baseline and the
// fault-current spectrum evaluated on the same stream. Reports come out
// both machine-readable (JSON) and as an aligned text table.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hifd/scenario.hpp"

namespace hifd {

struct EigenStats {
    std::size_t n = 0;
    std::complex<double> mean;
    double std_dev = 0.0;        // sqrt(mean |x - mean|^2)
    double mean_magnitude = 0.0; // mean of |x|
    Polar mean_polar;
};

[[nodiscard]] EigenStats eigen_stats(const std::vector<std::complex<double>>& values);

struct FaultOutcome {
    int index = 0;
    double start = 0.0;
    double duration = 0.0;
    bool detected = false;
    double alarm_time = 0.0;  // valid when detected
    double latency = 0.0;     // alarm_time - start
    EigenStats in_fault;
    double excursion_sigma = 0.0;  // |mean_in_fault - pre_mean| / pre_std
};

struct OcOutcome {
    OcSettings settings;
    double max_m = 0.0;            // whole run
    double max_m_in_fault = 0.0;   // inside fault windows only
    double relay_secondary = 0.0;  // mean late-fault secondary RMS, ampere
    bool tripped = false;
};

struct FaultSpectrum {
    double dc = 0.0;   // ampere, mean of the branch current
    double h2 = 0.0;   // ampere RMS at 2 f0
    double h3 = 0.0;   // ampere RMS at 3 f0
    double rms = 0.0;  // ampere, total branch RMS
};

struct RunReport {
    std::string scenario_name;
    std::string strategy;
    double rate = 0.0;
    std::optional<double> snr_db;
    std::uint64_t hif_seed = 0;
    std::uint64_t pmu_seed = 0;

    int faults_scheduled = 0;
    int faults_detected = 0;
    int faults_missed = 0;
    int false_alarms = 0;
    bool clean_run = false;  // empty schedule and no events
    std::vector<FaultOutcome> faults;
    EigenStats pre_fault;
    EigenStats in_fault;
    std::size_t withheld_estimates = 0;
    double armed_time = 0.0;

    OcOutcome oc;
    FaultSpectrum spectrum;

    // parallel discrete-ls pass in raw report mode (rate * lambda_d)
    EigenStats raw_discrete_pre;
    EigenStats raw_discrete_in_fault;

    double wall_ms = 0.0;
};

struct RunOptions {
    std::filesystem::path out_dir;  // empty -> no files written
    bool dump_waveform = false;
    bool dump_phasors = false;
    bool discrete_stats = true;
    bool dump_zone_polylines = false;  // plot-ready sampled boundaries
};

[[nodiscard]] RunReport run(const Scenario& s, const RunOptions& opts = {});

struct SweepReport {
    std::vector<RunReport> runs;
    // (rate, pre-fault mean |lambda| of the raw discrete mode / value at the first rate)
    std::vector<std::pair<double, double>> raw_ratios;
};

[[nodiscard]] SweepReport rate_sweep(const Scenario& s, const std::vector<double>& rates,
                                     const RunOptions& opts = {});

void write_report_json(const RunReport& r, const std::filesystem::path& path);
[[nodiscard]] std::string format_report_table(const RunReport& r);
[[nodiscard]] std::string format_sweep_table(const SweepReport& r);

}  // namespace hifd
