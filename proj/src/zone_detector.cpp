#include "hifd/zone_detector.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hifd/errors.hpp"

namespace hifd {

const char* to_string(DetectionEvent::Kind k) {
    return k == DetectionEvent::Kind::kAlarm ? "ALARM" : "CLEAR";
}

namespace {

double sq_dist(std::complex<double> a, std::complex<double> b) { return std::norm(a - b); }

double polyval(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

struct KmeansRun {
    std::vector<int> assignment;
    std::vector<std::complex<double>> centroids;
    double wcss = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(std::span<const std::complex<double>> pts, int k, std::mt19937_64& rng) {
    const std::size_t n = pts.size();
    std::vector<std::complex<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));

    // k-means++ seeding
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.push_back(pts[first(rng)]);
    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(pts[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(pts[pick]);
    }

    std::vector<int> assignment(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        std::vector<std::complex<double>> sums(static_cast<std::size_t>(k), {0.0, 0.0});
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(assignment[i])] += pts[i];
            ++counts[static_cast<std::size_t>(assignment[i])];
        }
        for (int c = 0; c < k; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (counts[uc] == 0) {
                // re-seed an empty cluster on the farthest point
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sq_dist(pts[i], centroids[static_cast<std::size_t>(assignment[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[uc] = pts[far];
                changed = true;
            } else {
                centroids[uc] = sums[uc] / static_cast<double>(counts[uc]);
            }
        }
        if (!changed) break;
    }

    KmeansRun run;
    run.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        run.wcss += sq_dist(pts[i], centroids[static_cast<std::size_t>(assignment[i])]);
    run.assignment = std::move(assignment);
    run.centroids = std::move(centroids);
    return run;
}

}  // namespace

ClusterResult cluster(std::span<const std::complex<double>> points, int k, std::uint64_t seed) {
    if (k < 1) throw InvalidParameterError("k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k))
        throw InsufficientDataError("fewer samples than clusters");
    std::mt19937_64 rng(seed);
    KmeansRun best;
    for (int restart = 0; restart < 5; ++restart) {
        KmeansRun run = kmeans_once(points, k, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return ClusterResult{std::move(best.assignment), std::move(best.centroids)};
}

double Zone::boundary_rho(double theta) const {
    if (rho_floor <= 0.0) return std::max(min_radius, 0.0);
    return margin * std::max(polyval(rho_coeffs, theta), rho_floor);
}

std::vector<Zone> fit_zones(std::span<const std::complex<double>> points,
                            std::span<const int> assignment, int k, const DetectorConfig& cfg,
                            double now) {
    if (points.size() != assignment.size())
        throw InvalidParameterError("fit_zones: size mismatch");
    std::vector<Zone> zones;
    zones.reserve(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        std::vector<std::complex<double>> members;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (assignment[i] == c) members.push_back(points[i]);
        if (members.size() < static_cast<std::size_t>(cfg.poly_degree + 2))
            throw InsufficientDataError("cluster too small for boundary fit");

        std::complex<double> centroid{0.0, 0.0};
        for (const auto& m : members) centroid += m;
        centroid /= static_cast<double>(members.size());

        Zone z;
        z.cluster_id = c;
        z.centroid = centroid;
        z.margin = cfg.margin;
        z.sample_count = members.size();
        z.last_update_time = now;
        z.min_radius = cfg.min_radius_frac * std::abs(centroid);

        std::vector<double> rho(members.size()), theta(members.size());
        double rho_max = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const std::complex<double> d = members[i] - centroid;
            rho[i] = std::abs(d);
            theta[i] = std::arg(d);
            rho_max = std::max(rho_max, rho[i]);
        }

        if (rho_max <= 1e-12 * std::max(1.0, std::abs(centroid))) {
            // all samples coincide: disc of the configured minimum radius
            z.rho_coeffs.assign(static_cast<std::size_t>(cfg.poly_degree) + 1, 0.0);
            z.rho_floor = 0.0;
            zones.push_back(std::move(z));
            continue;
        }

        // endpoint-wrap duplication keeps the fit continuous across +-pi
        std::vector<double> th_fit, rho_fit;
        const double band = kPi / 4.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            th_fit.push_back(theta[i]);
            rho_fit.push_back(rho[i]);
            if (theta[i] > kPi - band) {
                th_fit.push_back(theta[i] - 2.0 * kPi);
                rho_fit.push_back(rho[i]);
            } else if (theta[i] < -kPi + band) {
                th_fit.push_back(theta[i] + 2.0 * kPi);
                rho_fit.push_back(rho[i]);
            }
        }
        const auto rows = static_cast<Eigen::Index>(th_fit.size());
        const auto cols = static_cast<Eigen::Index>(cfg.poly_degree + 1);
        Eigen::MatrixXd vand(rows, cols);
        Eigen::VectorXd target(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            double pow_th = 1.0;
            for (Eigen::Index cdeg = 0; cdeg < cols; ++cdeg) {
                vand(r, cdeg) = pow_th;
                pow_th *= th_fit[static_cast<std::size_t>(r)];
            }
            target(r) = rho_fit[static_cast<std::size_t>(r)];
        }
        const Eigen::VectorXd sol = vand.colPivHouseholderQr().solve(target);
        z.rho_coeffs.assign(sol.data(), sol.data() + sol.size());

        std::vector<double> sorted_rho = rho;
        std::sort(sorted_rho.begin(), sorted_rho.end());
        const auto idx = static_cast<std::size_t>(
            std::ceil(0.95 * static_cast<double>(sorted_rho.size()))) - 1;
        z.rho_floor = sorted_rho[std::min(idx, sorted_rho.size() - 1)];
        zones.push_back(std::move(z));
    }
    return zones;
}

Classification classify(std::complex<double> point, std::span<const Zone> zones) {
    double best = std::numeric_limits<double>::infinity();
    for (const Zone& z : zones) {
        const std::complex<double> d = point - z.centroid;
        const double rho = std::abs(d);
        const double bound = z.boundary_rho(std::arg(d));
        const double ratio = bound > 0.0 ? rho / bound
                                         : (rho > 0.0 ? std::numeric_limits<double>::infinity()
                                                      : 0.0);
        best = std::min(best, ratio - 1.0);
    }
    return Classification{best <= 0.0, best};
}

ZoneDetector::ZoneDetector(const DetectorConfig& cfg, std::string line_id)
    : cfg_(cfg), line_id_(std::move(line_id)) {
    if (cfg.k_clusters < 1 || cfg.poly_degree < 0 || cfg.confirm_count < 1 ||
        cfg.training_min < 1 || cfg.margin < 1.0 || cfg.update_interval <= 0.0)
        throw InvalidParameterError("invalid DetectorConfig");
}

bool ZoneDetector::try_fit(double now) {
    try {
        const ClusterResult cr = cluster(training_, cfg_.k_clusters, cfg_.seed);
        zones_ = fit_zones(training_, cr.assignment, cfg_.k_clusters, cfg_, now);
    } catch (const InsufficientDataError&) {
        return false;  // keep previous zones; try again with more data
    }
    if (snapshot_) snapshot_(now, zones_);
    return true;
}

std::optional<DetectionEvent> ZoneDetector::step(const EstimateOutcome& outcome) {
    if (outcome.withheld()) return std::nullopt;
    const EigenSample& s = *outcome.sample;

    if (!armed_) {
        training_.push_back(s.lambda);
        if (training_.size() >= static_cast<std::size_t>(cfg_.training_min) && try_fit(s.t)) {
            armed_ = true;
            last_refit_ = s.t;
            training_.clear();
        }
        return std::nullopt;
    }

    const Classification cls = classify(s.lambda, zones_);
    std::optional<DetectionEvent> event;
    if (cls.in_zone) {
        consec_out_ = 0;
        if (alarm_active_) {
            alarm_active_ = false;
            event = DetectionEvent{s.t, line_id_, DetectionEvent::Kind::kClear, s, cls.distance};
        }
        training_.push_back(s.lambda);
    } else {
        ++consec_out_;
        if (!alarm_active_ && consec_out_ >= cfg_.confirm_count) {
            alarm_active_ = true;
            event = DetectionEvent{s.t, line_id_, DetectionEvent::Kind::kAlarm, s, cls.distance};
        }
    }

    if (s.t - last_refit_ >= cfg_.update_interval) {
        if (try_fit(s.t)) training_.clear();
        last_refit_ = s.t;
    }
    return event;
}

}  // namespace hifd
