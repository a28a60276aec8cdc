#pragma once

// Declarative experiment description: line, load, fault model, schedule,
// PMU, estimator, detector, and relay settings. Ships with the three
// study presets (671, 675, 634) and round-trips through JSON files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hifd/eigen_estimator.hpp"
#include "hifd/oc_relay.hpp"
#include "hifd/pmu_frontend.hpp"
#include "hifd/waveform_sim.hpp"
#include "hifd/zone_detector.hpp"

namespace hifd {

struct Scenario {
    std::string name = "custom";
    LineParams line;
    LoadParams load;
    std::optional<HifParams> hif;
    std::vector<FaultWindow> schedule;
    PmuConfig pmu;
    EstimatorConfig estimator;
    DetectorConfig detector;
    std::optional<OcSettings> oc;  // absent -> derived from line with oc_margin
    double oc_margin = 0.15;
    double f_sim = 7680.0;
    double hour_window = 10.0;  // seconds per profile hour ("compressed day")
    double duration = 0.0;      // second; 0 -> 24 * hour_window

    [[nodiscard]] double effective_duration() const {
        return duration > 0.0 ? duration : 24.0 * hour_window;
    }
    [[nodiscard]] OcSettings oc_settings() const {
        return oc ? *oc : derive_settings(line, oc_margin);
    }
};

/// Throws ConfigError on out-of-domain values (rate not in {30,60,120},
/// schedule outside the run, ...).
void validate(const Scenario& s);

/// One fault per listed hour at offset_frac into the hour.
[[nodiscard]] std::vector<FaultWindow> hourly_schedule(double hour_window, double offset_frac,
                                                       double duration,
                                                       const std::vector<int>& hours);

[[nodiscard]] bool is_preset_name(const std::string& name);

/// Study presets: nominal currents 207 A (671), 98 A (675), 190 A (634);
/// 24 hourly faults, 30 Hz reporting, 60 dB SNR.
[[nodiscard]] Scenario preset_scenario(const std::string& name);

/// Accepts a preset name or a JSON scenario file path.
[[nodiscard]] Scenario resolve_scenario(const std::string& name_or_path);

[[nodiscard]] Scenario load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const Scenario& s, const std::filesystem::path& path);

}  // namespace hifd
