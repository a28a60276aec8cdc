#pragma once

// Online change detection in the eigenvalue plane: k-means clusters,
// adaptive polynomial zone boundaries in centroid-centered polar form,
// confirm-counted alarms, and quarantine of out-of-zone samples from
// every refit so zones never learn a fault.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hifd/eigen_estimator.hpp"

namespace hifd {

struct DetectorConfig {
    int k_clusters = 2;
    int poly_degree = 2;
    double margin = 1.5;           // radial factor, >= 1
    int confirm_count = 3;         // consecutive out-of-zone samples to alarm
    double update_interval = 60.0; // simulated seconds between refits
    int training_min = 100;        // samples before arming
    double min_radius_frac = 0.01; // degenerate-cluster disc radius vs |centroid|
    std::uint64_t seed = 2024;     // k-means++ seed
};

/// One cluster's fitted boundary: rho(theta) polynomial around the
/// centroid with a radial p95 floor, scaled by the margin.
struct Zone {
    int cluster_id = 0;
    std::complex<double> centroid;
    std::vector<double> rho_coeffs;  // ascending powers of theta
    double rho_floor = 0.0;          // sample 95th-percentile radius
    double min_radius = 0.0;         // degenerate-cluster disc radius
    double margin = 1.0;
    std::size_t sample_count = 0;
    double last_update_time = 0.0;

    /// margin * max(fitted rho(theta), rho_floor), floored for degenerate fits.
    [[nodiscard]] double boundary_rho(double theta) const;
};

struct Classification {
    bool in_zone = false;
    double distance = 0.0;  // min over zones of rho/boundary - 1; negative inside
};

struct DetectionEvent {
    enum class Kind { kAlarm, kClear };
    double t = 0.0;
    std::string line_id;
    Kind kind = Kind::kAlarm;
    EigenSample sample;
    double distance = 0.0;
};

[[nodiscard]] const char* to_string(DetectionEvent::Kind k);

struct ClusterResult {
    std::vector<int> assignment;
    std::vector<std::complex<double>> centroids;
};

/// Seeded k-means++ in the complex plane; best of 5 restarts by
/// within-cluster sum of squares, 100-iteration cap, empty clusters
/// re-seeded on the farthest point. Throws InsufficientDataError when
/// fewer than k samples are given.
[[nodiscard]] ClusterResult cluster(std::span<const std::complex<double>> points, int k,
                                    std::uint64_t seed);

/// Fits one zone per cluster. Throws InsufficientDataError when any
/// cluster has fewer than poly_degree + 2 members.
[[nodiscard]] std::vector<Zone> fit_zones(std::span<const std::complex<double>> points,
                                          std::span<const int> assignment, int k,
                                          const DetectorConfig& cfg, double now);

/// A sample is in-zone when it lies inside at least one boundary
/// (boundaries are closed).
[[nodiscard]] Classification classify(std::complex<double> point, std::span<const Zone> zones);

class ZoneDetector {
public:
    using SnapshotSink = std::function<void(double t, const std::vector<Zone>&)>;

    ZoneDetector(const DetectorConfig& cfg, std::string line_id);

    /// Withheld estimates advance nothing. ALARM fires on the
    /// confirm_count-th consecutive out-of-zone sample; the first
    /// in-zone sample afterwards emits CLEAR.
    std::optional<DetectionEvent> step(const EstimateOutcome& outcome);

    [[nodiscard]] bool armed() const { return armed_; }
    [[nodiscard]] bool alarm_active() const { return alarm_active_; }
    [[nodiscard]] const std::vector<Zone>& zones() const { return zones_; }

    /// Called with every freshly fitted zone set (arming and refits).
    void set_snapshot_sink(SnapshotSink sink) { snapshot_ = std::move(sink); }

private:
    DetectorConfig cfg_;
    std::string line_id_;
    bool armed_ = false;
    bool alarm_active_ = false;
    int consec_out_ = 0;
    double last_refit_ = 0.0;
    std::vector<std::complex<double>> training_;
    std::vector<Zone> zones_;
    SnapshotSink snapshot_;

    bool try_fit(double now);
};

}  // namespace hifd
