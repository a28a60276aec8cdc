// Command-line front end: run single scenarios, sweep reporting rates,
// calibrate fault magnitudes, and emit plot-ready CSVs.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "hifd/csv.hpp"
#include "hifd/scenario.hpp"
#include "hifd/scenario_runner.hpp"

namespace {

struct CommonArgs {
    std::string scenario;
    std::string out_dir;
    double rate = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string strategy;
    bool raw_discrete = false;
    double snr_db = 0.0;
    bool snr_set = false;
    bool no_noise = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required = false) {
    cmd->add_option("--scenario", args.scenario,
                    "Preset name (671, 675, 634) or scenario JSON file")
        ->required();
    auto* out = cmd->add_option("--out", args.out_dir, "Output directory for CSVs and reports");
    if (out_required) out->required();
    cmd->add_option("--rate", args.rate, "PMU reporting rate override (30, 60, 120)");
    cmd->add_option("--seed", args.seed, "Base seed: hif uses seed, pmu noise seed+1")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--strategy", args.strategy, "Estimator strategy (impedance | discrete-ls)");
    cmd->add_flag("--raw-discrete", args.raw_discrete,
                  "Report rate*lambda_d instead of rate*log(lambda_d) for discrete-ls");
    cmd->add_option("--snr", args.snr_db, "Phasor SNR override in dB")
        ->each([&](const std::string&) { args.snr_set = true; });
    cmd->add_flag("--no-noise", args.no_noise, "Disable phasor noise injection");
}

hifd::Scenario make_scenario(const CommonArgs& args) {
    hifd::Scenario s = hifd::resolve_scenario(args.scenario);
    if (args.rate > 0.0) s.pmu.rate = args.rate;
    if (args.seed_set) {
        if (s.hif) s.hif->seed = args.seed;
        s.pmu.seed = args.seed + 1;
    }
    if (!args.strategy.empty()) {
        if (args.strategy == "impedance")
            s.estimator.strategy = hifd::EstimatorStrategy::kImpedance;
        else if (args.strategy == "discrete-ls")
            s.estimator.strategy = hifd::EstimatorStrategy::kDiscreteLs;
        else
            throw hifd::ConfigError("unknown strategy: " + args.strategy);
    }
    if (args.raw_discrete) s.estimator.raw_discrete = true;
    if (args.no_noise) s.pmu.snr_db.reset();
    else if (args.snr_set) s.pmu.snr_db = args.snr_db;
    return s;
}

double preset_fault_target(const std::string& name) {
    if (name == "671") return 14.0;
    if (name == "675") return 13.0;
    if (name == "634") return 17.0;
    return 0.0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-impedance fault detection via eigenvalue zones"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, plot_args, cal_args;
    bool assert_detection = false, sweep_assert = false, dump_waveform = false;
    std::vector<double> rates{30.0, 60.0, 120.0};
    double cal_target = 0.0;
    std::string cal_save;

    auto* cmd_run = app.add_subcommand("run", "Run one scenario end to end");
    add_common(cmd_run, run_args);
    cmd_run->add_flag("--assert", assert_detection, "Exit nonzero when a scheduled fault is missed");
    cmd_run->add_flag("--dump-waveform", dump_waveform, "Also write point-on-wave CSV");

    auto* cmd_sweep = app.add_subcommand("sweep", "Run one scenario at several reporting rates");
    add_common(cmd_sweep, sweep_args);
    cmd_sweep->add_option("--rates", rates, "Rates to sweep")->delimiter(',');
    cmd_sweep->add_flag("--assert", sweep_assert, "Exit nonzero when any rate misses a fault");

    auto* cmd_cal = app.add_subcommand("calibrate", "Scale fault resistances to a target RMS");
    add_common(cmd_cal, cal_args);
    cmd_cal->add_option("--target", cal_target, "Target fault branch RMS (ampere)");
    cmd_cal->add_option("--save", cal_save, "Write the calibrated scenario JSON here");

    auto* cmd_plot = app.add_subcommand("plot-data",
                                        "Run and emit plot-ready eigen/zone CSVs");
    add_common(cmd_plot, plot_args, /*out_required=*/true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            hifd::Scenario s = make_scenario(run_args);
            hifd::RunOptions opts;
            opts.out_dir = run_args.out_dir;
            opts.dump_waveform = dump_waveform;
            opts.dump_phasors = !run_args.out_dir.empty();
            const hifd::RunReport rep = hifd::run(s, opts);
            std::cout << hifd::format_report_table(rep);
            if (assert_detection && rep.faults_missed > 0) {
                std::cerr << "ASSERT: " << rep.faults_missed << " scheduled fault(s) missed\n";
                return 2;
            }
        } else if (cmd_sweep->parsed()) {
            hifd::Scenario s = make_scenario(sweep_args);
            hifd::RunOptions opts;
            opts.out_dir = sweep_args.out_dir;
            const hifd::SweepReport sweep = hifd::rate_sweep(s, rates, opts);
            std::cout << hifd::format_sweep_table(sweep);
            if (sweep_assert)
                for (const hifd::RunReport& r : sweep.runs)
                    if (r.faults_missed > 0) {
                        std::cerr << "ASSERT: missed fault(s) at rate "
                                  << hifd::format_double(r.rate) << "\n";
                        return 2;
                    }
        } else if (cmd_cal->parsed()) {
            hifd::Scenario s = make_scenario(cal_args);
            if (!s.hif) throw hifd::ConfigError("scenario has no hif block to calibrate");
            double target = cal_target > 0.0 ? cal_target : preset_fault_target(s.name);
            if (target <= 0.0)
                throw hifd::ConfigError("pass --target for non-preset scenarios");
            const hifd::HifParams calibrated =
                hifd::calibrate_to_target(*s.hif, target, s.line, s.load);
            std::printf("calibrated to %.6g A RMS:\n", target);
            std::printf("  r_p_bounds  [%.6g, %.6g] ohm\n", calibrated.r_p_bounds.first,
                        calibrated.r_p_bounds.second);
            std::printf("  r_n_bounds  [%.6g, %.6g] ohm\n", calibrated.r_n_bounds.first,
                        calibrated.r_n_bounds.second);
            std::printf("  sigma_step  %.6g ohm\n", calibrated.sigma_step);
            if (!cal_save.empty()) {
                s.hif = calibrated;
                hifd::save_scenario_file(s, cal_save);
                std::printf("saved %s\n", cal_save.c_str());
            }
        } else if (cmd_plot->parsed()) {
            hifd::Scenario s = make_scenario(plot_args);
            hifd::RunOptions opts;
            opts.out_dir = plot_args.out_dir;
            opts.dump_phasors = true;
            opts.dump_zone_polylines = true;
            const hifd::RunReport rep = hifd::run(s, opts);
            std::cout << hifd::format_report_table(rep);
            std::cout << "plot data in " << plot_args.out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
