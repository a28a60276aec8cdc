#include "hifd/scenario_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hifd/csv.hpp"
#include "hifd/errors.hpp"

namespace hifd {

EigenStats eigen_stats(const std::vector<std::complex<double>>& values) {
    EigenStats st;
    st.n = values.size();
    if (values.empty()) return st;
    std::complex<double> sum{0.0, 0.0};
    double mag_sum = 0.0;
    for (const auto& v : values) {
        sum += v;
        mag_sum += std::abs(v);
    }
    st.mean = sum / static_cast<double>(values.size());
    st.mean_magnitude = mag_sum / static_cast<double>(values.size());
    double var = 0.0;
    for (const auto& v : values) var += std::norm(v - st.mean);
    st.std_dev = std::sqrt(var / static_cast<double>(values.size()));
    st.mean_polar = to_polar(st.mean);
    return st;
}

namespace {

struct TimedSample {
    double t;
    std::complex<double> lambda;
};

bool in_any_window(double t, const std::vector<FaultWindow>& windows, double pre_pad,
                   double post_pad) {
    for (const FaultWindow& w : windows)
        if (t >= w.start - pre_pad && t <= w.end() + post_pad) return true;
    return false;
}

std::vector<std::complex<double>> values_between(const std::vector<TimedSample>& samples,
                                                 double t0, double t1) {
    std::vector<std::complex<double>> out;
    for (const TimedSample& s : samples)
        if (s.t >= t0 && s.t <= t1) out.push_back(s.lambda);
    return out;
}

}  // namespace

RunReport run(const Scenario& s, const RunOptions& opts) {
    validate(s);
    const auto t_begin = std::chrono::steady_clock::now();

    RunReport rep;
    rep.scenario_name = s.name;
    rep.strategy = to_string(s.estimator.strategy);
    rep.rate = s.pmu.rate;
    rep.snr_db = s.pmu.snr_db;
    rep.hif_seed = s.hif ? s.hif->seed : 0;
    rep.pmu_seed = s.pmu.seed;
    rep.faults_scheduled = static_cast<int>(s.schedule.size());

    SimConfig sim;
    sim.line = s.line;
    sim.load = s.load;
    sim.hif = s.hif;
    sim.schedule = s.schedule;
    sim.f_sim = s.f_sim;
    sim.duration = s.effective_duration();
    sim.hour_window = s.hour_window;

    PhasorExtractor pmu(s.pmu, s.f_sim, s.line.f_nominal);
    EigenEstimator estimator(s.estimator, s.line);

    std::optional<EigenEstimator> raw_estimator;
    if (opts.discrete_stats) {
        EstimatorConfig raw_cfg = s.estimator;
        raw_cfg.strategy = EstimatorStrategy::kDiscreteLs;
        raw_cfg.raw_discrete = true;
        raw_cfg.window_len = std::max(raw_cfg.window_len, 4);
        raw_estimator.emplace(raw_cfg, s.line);
    }

    ZoneDetector detector(s.detector, s.name);
    const OcSettings oc = s.oc_settings();
    rep.oc.settings = oc;
    CycleRms relay_rms(s.f_sim, s.line.f_nominal);

    // optional output files
    const bool dumping = !opts.out_dir.empty();
    CsvWriter waveform_csv, phasor_csv, eigen_csv, raw_csv, event_csv, boundary_csv;
    std::ofstream zone_txt;
    if (dumping) {
        std::filesystem::create_directories(opts.out_dir);
        if (opts.dump_waveform)
            waveform_csv.open(opts.out_dir / "waveform.csv",
                              "t,v_send,i_send,v_recv,i_recv,fault_active");
        if (opts.dump_phasors)
            phasor_csv.open(opts.out_dir / "phasors.csv",
                            "t,vs_mag,vs_ang,is_mag,is_ang,vr_mag,vr_ang,ir_mag,ir_ang,rate");
        eigen_csv.open(opts.out_dir / "eigens.csv",
                       "t,re,im,mag,angle_deg,strategy,withheld_flag");
        if (raw_estimator)
            raw_csv.open(opts.out_dir / "eigens_raw_discrete.csv",
                         "t,re,im,mag,angle_deg,strategy,withheld_flag");
        event_csv.open(opts.out_dir / "events.csv", "t,line_id,kind,re,im,distance");
        zone_txt.open(opts.out_dir / "zones.txt");
        if (opts.dump_zone_polylines)
            boundary_csv.open(opts.out_dir / "zone_boundaries.csv",
                              "fit_time,cluster_id,theta,rho,re,im");
    }

    detector.set_snapshot_sink([&](double t, const std::vector<Zone>& zones) {
        if (!dumping) return;
        for (const Zone& z : zones) {
            zone_txt << "t=" << format_double(t) << " cluster=" << z.cluster_id
                     << " centroid=" << format_double(z.centroid.real()) << ","
                     << format_double(z.centroid.imag())
                     << " degree=" << (z.rho_coeffs.empty() ? 0 : z.rho_coeffs.size() - 1)
                     << " coeffs=";
            for (std::size_t i = 0; i < z.rho_coeffs.size(); ++i)
                zone_txt << (i ? " " : "") << format_double(z.rho_coeffs[i]);
            zone_txt << " rho_floor=" << format_double(z.rho_floor)
                     << " margin=" << format_double(z.margin) << " n=" << z.sample_count
                     << "\n";
        }
        if (opts.dump_zone_polylines && boundary_csv.is_open()) {
            for (const Zone& z : zones) {
                for (int k = 0; k <= 360; ++k) {
                    const double theta = -kPi + k * (2.0 * kPi / 360.0);
                    const double rho = z.boundary_rho(theta);
                    const std::complex<double> p =
                        z.centroid + std::polar(rho, theta);
                    boundary_csv.row()
                        .col(t)
                        .col(z.cluster_id)
                        .col(theta)
                        .col(rho)
                        .col(p.real())
                        .col(p.imag());
                }
            }
        }
    });

    // accumulators
    std::vector<TimedSample> samples, raw_samples;
    std::vector<DetectionEvent> events;
    const double w0 = s.line.omega_nominal();
    std::complex<double> h2_acc{0.0, 0.0}, h3_acc{0.0, 0.0};
    double dc_acc = 0.0, sq_acc = 0.0;
    std::size_t spec_n = 0;
    const double spectrum_skip = 0.25;  // settle time after each onset
    double relay_sec_sum = 0.0;
    std::size_t relay_sec_n = 0;

    simulate_segment(sim, [&](const WaveformFrame& f) {
        if (waveform_csv.is_open())
            waveform_csv.row()
                .col(f.t)
                .col(f.v_send)
                .col(f.i_send)
                .col(f.v_recv)
                .col(f.i_recv)
                .col(f.fault_active);

        if (auto r = relay_rms.push(f.i_send)) {
            const double secondary = *r / oc.ct.turns();
            const double m = evaluate(secondary, oc).m;
            rep.oc.max_m = std::max(rep.oc.max_m, m);
            for (const FaultWindow& w : s.schedule) {
                if (!w.contains(f.t)) continue;
                rep.oc.max_m_in_fault = std::max(rep.oc.max_m_in_fault, m);
                if (f.t >= w.start + 0.5 * w.duration) {
                    relay_sec_sum += secondary;
                    ++relay_sec_n;
                }
            }
        }

        if (f.fault_active) {
            for (const FaultWindow& w : s.schedule) {
                if (w.contains(f.t) && f.t >= w.start + spectrum_skip) {
                    dc_acc += f.i_fault;
                    sq_acc += f.i_fault * f.i_fault;
                    h2_acc += f.i_fault * std::polar(1.0, -2.0 * w0 * f.t);
                    h3_acc += f.i_fault * std::polar(1.0, -3.0 * w0 * f.t);
                    ++spec_n;
                    break;
                }
            }
        }

        auto ph = pmu.push(f);
        if (!ph) return;
        if (phasor_csv.is_open())
            phasor_csv.row()
                .col(ph->t)
                .col(std::abs(ph->v_send))
                .col(std::arg(ph->v_send))
                .col(std::abs(ph->i_send))
                .col(std::arg(ph->i_send))
                .col(std::abs(ph->v_recv))
                .col(std::arg(ph->v_recv))
                .col(std::abs(ph->i_recv))
                .col(std::arg(ph->i_recv))
                .col(ph->rate);

        if (auto outcome = estimator.push(*ph)) {
            if (eigen_csv.is_open()) {
                auto row = eigen_csv.row();
                row.col(ph->t);
                if (outcome->sample) {
                    const EigenSample& e = *outcome->sample;
                    row.col(e.lambda.real())
                        .col(e.lambda.imag())
                        .col(e.polar.magnitude)
                        .col(e.polar.angle_deg);
                } else {
                    row.col("nan").col("nan").col("nan").col("nan");
                }
                row.col(rep.strategy).col(outcome->withheld());
            }
            if (outcome->sample) {
                samples.push_back({outcome->sample->t, outcome->sample->lambda});
            } else {
                ++rep.withheld_estimates;
            }
            const bool was_armed = detector.armed();
            if (auto ev = detector.step(*outcome)) {
                events.push_back(*ev);
                if (event_csv.is_open())
                    event_csv.row()
                        .col(ev->t)
                        .col(ev->line_id)
                        .col(std::string(to_string(ev->kind)))
                        .col(ev->sample.lambda.real())
                        .col(ev->sample.lambda.imag())
                        .col(ev->distance);
            }
            if (!was_armed && detector.armed()) rep.armed_time = ph->t;
        }
        if (raw_estimator) {
            if (auto outcome = raw_estimator->push(*ph)) {
                if (raw_csv.is_open()) {
                    auto row = raw_csv.row();
                    row.col(ph->t);
                    if (outcome->sample) {
                        const EigenSample& e = *outcome->sample;
                        row.col(e.lambda.real())
                            .col(e.lambda.imag())
                            .col(e.polar.magnitude)
                            .col(e.polar.angle_deg);
                    } else {
                        row.col("nan").col("nan").col("nan").col("nan");
                    }
                    row.col(std::string("discrete-ls-raw")).col(outcome->withheld());
                }
                if (outcome->sample)
                    raw_samples.push_back({outcome->sample->t, outcome->sample->lambda});
            }
        }
    });

    // fault spectrum (aggregated over every in-fault steady window)
    if (spec_n > 0) {
        const double n = static_cast<double>(spec_n);
        rep.spectrum.dc = std::abs(dc_acc) / n;
        rep.spectrum.h2 = std::sqrt(2.0) * std::abs(h2_acc) / n;
        rep.spectrum.h3 = std::sqrt(2.0) * std::abs(h3_acc) / n;
        rep.spectrum.rms = std::sqrt(sq_acc / n);
    }
    if (relay_sec_n > 0) rep.oc.relay_secondary = relay_sec_sum / static_cast<double>(relay_sec_n);
    rep.oc.tripped = rep.oc.max_m > 1.0;

    // pre-fault / in-fault statistics
    const double window_span = s.estimator.window_len / s.pmu.rate;
    const double post_pad = window_span + s.detector.confirm_count / s.pmu.rate + 0.5;
    const double attr_grace = window_span + s.detector.confirm_count / s.pmu.rate + 0.2;

    std::vector<std::complex<double>> pre_vals, fault_vals, raw_pre, raw_fault;
    for (const TimedSample& ts : samples) {
        if (ts.t < rep.armed_time) continue;
        if (!in_any_window(ts.t, s.schedule, 0.0, post_pad)) pre_vals.push_back(ts.lambda);
    }
    for (const TimedSample& ts : raw_samples) {
        if (ts.t < rep.armed_time) continue;
        if (!in_any_window(ts.t, s.schedule, 0.0, post_pad)) raw_pre.push_back(ts.lambda);
    }
    rep.pre_fault = eigen_stats(pre_vals);
    rep.raw_discrete_pre = eigen_stats(raw_pre);

    int index = 0;
    for (const FaultWindow& w : s.schedule) {
        FaultOutcome fo;
        fo.index = index++;
        fo.start = w.start;
        fo.duration = w.duration;
        double t0 = w.start + window_span;
        if (t0 >= w.end()) t0 = w.start;  // short fault: use every overlapped sample
        const auto vals = values_between(samples, t0, w.end());
        fo.in_fault = eigen_stats(vals);
        fault_vals.insert(fault_vals.end(), vals.begin(), vals.end());
        const auto rvals = values_between(raw_samples, t0, w.end());
        raw_fault.insert(raw_fault.end(), rvals.begin(), rvals.end());
        if (rep.pre_fault.std_dev > 0.0 && fo.in_fault.n > 0)
            fo.excursion_sigma =
                std::abs(fo.in_fault.mean - rep.pre_fault.mean) / rep.pre_fault.std_dev;
        for (const DetectionEvent& ev : events) {
            if (ev.kind != DetectionEvent::Kind::kAlarm) continue;
            if (ev.t >= w.start && ev.t <= w.end() + attr_grace) {
                fo.detected = true;
                fo.alarm_time = ev.t;
                fo.latency = ev.t - w.start;
                break;
            }
        }
        rep.faults.push_back(fo);
        if (fo.detected) ++rep.faults_detected;
    }
    rep.faults_missed = rep.faults_scheduled - rep.faults_detected;
    rep.in_fault = eigen_stats(fault_vals);
    rep.raw_discrete_in_fault = eigen_stats(raw_fault);

    for (const DetectionEvent& ev : events) {
        if (ev.kind != DetectionEvent::Kind::kAlarm) continue;
        bool attributed = false;
        for (const FaultWindow& w : s.schedule)
            if (ev.t >= w.start && ev.t <= w.end() + attr_grace) attributed = true;
        if (!attributed) ++rep.false_alarms;
    }
    rep.clean_run = s.schedule.empty() && events.empty();

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t_begin)
                      .count();

    if (dumping) {
        CsvWriter oc_csv(opts.out_dir / "oc.csv", "pickup,ct,tap,max_M,tripped");
        std::ostringstream ct;
        ct << format_double(oc.ct.primary) << ":" << format_double(oc.ct.secondary);
        oc_csv.row()
            .col(oc.pickup)
            .col(ct.str())
            .col(oc.tap)
            .col(rep.oc.max_m)
            .col(rep.oc.tripped);
        write_report_json(rep, opts.out_dir / "report.json");
        std::ofstream table(opts.out_dir / "report.txt");
        table << format_report_table(rep);
    }
    return rep;
}

SweepReport rate_sweep(const Scenario& s, const std::vector<double>& rates,
                       const RunOptions& opts) {
    if (rates.empty()) throw ConfigError("rate_sweep: rates must be non-empty");
    SweepReport sweep;
    for (double rate : rates) {
        Scenario sr = s;
        sr.pmu.rate = rate;
        RunOptions ro = opts;
        if (!opts.out_dir.empty()) {
            std::ostringstream dir;
            dir << "rate_" << format_double(rate);
            ro.out_dir = opts.out_dir / dir.str();
        }
        ro.discrete_stats = true;
        sweep.runs.push_back(run(sr, ro));
    }
    const double base = sweep.runs.front().raw_discrete_pre.mean_magnitude;
    for (const RunReport& r : sweep.runs)
        sweep.raw_ratios.emplace_back(r.rate,
                                      base > 0.0 ? r.raw_discrete_pre.mean_magnitude / base
                                                 : 0.0);
    return sweep;
}

namespace {

nlohmann::json stats_json(const EigenStats& st) {
    return {{"n", st.n},
            {"mean_re", st.mean.real()},
            {"mean_im", st.mean.imag()},
            {"mean_mag", st.mean_polar.magnitude},
            {"mean_angle_deg", st.mean_polar.angle_deg},
            {"mean_abs", st.mean_magnitude},
            {"std", st.std_dev}};
}

}  // namespace

void write_report_json(const RunReport& r, const std::filesystem::path& path) {
    nlohmann::json j;
    j["scenario"] = r.scenario_name;
    j["strategy"] = r.strategy;
    j["rate"] = r.rate;
    if (r.snr_db) j["snr_db"] = *r.snr_db;
    j["seeds"] = {{"hif", r.hif_seed}, {"pmu", r.pmu_seed}};
    j["faults_scheduled"] = r.faults_scheduled;
    j["faults_detected"] = r.faults_detected;
    j["faults_missed"] = r.faults_missed;
    j["false_alarms"] = r.false_alarms;
    j["clean_run"] = r.clean_run;
    j["withheld_estimates"] = r.withheld_estimates;
    j["armed_time"] = r.armed_time;
    j["pre_fault"] = stats_json(r.pre_fault);
    j["in_fault"] = stats_json(r.in_fault);
    j["raw_discrete_pre"] = stats_json(r.raw_discrete_pre);
    j["raw_discrete_in_fault"] = stats_json(r.raw_discrete_in_fault);
    j["faults"] = nlohmann::json::array();
    for (const FaultOutcome& f : r.faults) {
        nlohmann::json jf = {{"index", f.index},
                             {"start", f.start},
                             {"duration", f.duration},
                             {"detected", f.detected},
                             {"excursion_sigma", f.excursion_sigma},
                             {"in_fault", stats_json(f.in_fault)}};
        if (f.detected) {
            jf["alarm_time"] = f.alarm_time;
            jf["latency"] = f.latency;
        }
        j["faults"].push_back(jf);
    }
    j["oc"] = {{"pickup", r.oc.settings.pickup},
               {"ct_primary", r.oc.settings.ct.primary},
               {"ct_secondary", r.oc.settings.ct.secondary},
               {"tap", r.oc.settings.tap},
               {"max_m", r.oc.max_m},
               {"max_m_in_fault", r.oc.max_m_in_fault},
               {"relay_secondary", r.oc.relay_secondary},
               {"tripped", r.oc.tripped}};
    j["spectrum"] = {{"dc", r.spectrum.dc},
                     {"h2", r.spectrum.h2},
                     {"h3", r.spectrum.h3},
                     {"rms", r.spectrum.rms}};
    j["wall_ms"] = r.wall_ms;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write report: " + path.string());
    out << j.dump(2) << "\n";
}

std::string format_report_table(const RunReport& r) {
    std::ostringstream os;
    auto line = [&](const std::string& k, const std::string& v) {
        os << "  " << k;
        for (std::size_t i = k.size(); i < 26; ++i) os << ' ';
        os << v << "\n";
    };
    auto polar_str = [&](const EigenStats& st) {
        std::ostringstream p;
        p << format_double(st.mean_polar.magnitude) << " @ "
          << format_double(st.mean_polar.angle_deg) << " deg  (std "
          << format_double(st.std_dev) << ", n=" << st.n << ")";
        return p.str();
    };
    os << "Scenario " << r.scenario_name << "  [" << r.strategy << " @ "
       << format_double(r.rate) << " Hz";
    if (r.snr_db) os << ", SNR " << format_double(*r.snr_db) << " dB";
    os << "]\n";
    line("faults detected", std::to_string(r.faults_detected) + " / " +
                                std::to_string(r.faults_scheduled));
    line("false alarms", std::to_string(r.false_alarms));
    if (r.clean_run) line("clean run", "yes (no faults scheduled, no events)");
    line("pre-fault eigenvalue", polar_str(r.pre_fault));
    line("in-fault eigenvalue", polar_str(r.in_fault));
    double min_exc = 0.0;
    bool first = true;
    for (const FaultOutcome& f : r.faults) {
        if (f.in_fault.n == 0) continue;
        min_exc = first ? f.excursion_sigma : std::min(min_exc, f.excursion_sigma);
        first = false;
    }
    if (!first) line("excursion (min fault)", format_double(min_exc) + " sigma");
    line("fault branch", "rms " + format_double(r.spectrum.rms) + " A, dc " +
                             format_double(r.spectrum.dc) + " A, 2nd " +
                             format_double(r.spectrum.h2) + " A, 3rd " +
                             format_double(r.spectrum.h3) + " A");
    {
        std::ostringstream oc;
        oc << "pickup " << format_double(r.oc.settings.pickup) << " A, CT "
           << format_double(r.oc.settings.ct.primary) << ":"
           << format_double(r.oc.settings.ct.secondary) << ", tap "
           << format_double(r.oc.settings.tap) << " A";
        line("oc relay", oc.str());
    }
    line("relay fault current", format_double(r.oc.relay_secondary) + " A secondary");
    line("oc max M", format_double(r.oc.max_m) + (r.oc.tripped ? "  -> TRIP" : "  -> no trip"));
    line("withheld estimates", std::to_string(r.withheld_estimates));
    line("wall time", format_double(r.wall_ms) + " ms");
    return os.str();
}

std::string format_sweep_table(const SweepReport& r) {
    std::ostringstream os;
    os << "Rate sweep (" << r.runs.front().scenario_name << ")\n";
    os << "  rate_hz  detected  false_alarms  pre_mean_mag  raw_pre_mean_mag  raw_ratio\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const RunReport& run = r.runs[i];
        os << "  " << format_double(run.rate) << "  " << run.faults_detected << "/"
           << run.faults_scheduled << "  " << run.false_alarms << "  "
           << format_double(run.pre_fault.mean_polar.magnitude) << "  "
           << format_double(run.raw_discrete_pre.mean_magnitude) << "  "
           << format_double(r.raw_ratios[i].second) << "\n";
    }
    return os.str();
}

}  // namespace hifd
