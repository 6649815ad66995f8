// Command-line front end: run a single simulation, sweep a parameter across
// schemes and seeds, or benchmark all search schemes side by side.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "eetbf/config.hpp"
#include "eetbf/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::int64_t seed = 0;
    std::int64_t frames = 0;
    std::string out_dir = "out";
    double window = 0.5;
    CLI::Option *seed_opt = nullptr;
    CLI::Option *frames_opt = nullptr;
};

void add_common(CLI::App *cmd, CommonArgs &args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", args.sets, "override a configuration key (key=value)")
        ->take_all();
    args.seed_opt = cmd->add_option("--seed", args.seed, "base RNG seed");
    args.frames_opt = cmd->add_option("--frames", args.frames, "number of frames");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--window", args.window,
                    "trailing fraction of frames averaged in summaries")
        ->check(CLI::Range(1e-9, 1.0))
        ->capture_default_str();
}

eetbf::ConfigMap build_config(const CommonArgs &args) {
    eetbf::ConfigMap cfg;
    if (!args.config_path.empty()) cfg.apply_file(args.config_path);
    for (const auto &kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw eetbf::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed_opt->count() > 0) cfg.set("sim.seed", std::to_string(args.seed));
    if (args.frames_opt->count() > 0) cfg.set("sim.frames", std::to_string(args.frames));
    return cfg;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"discrete-frame simulator for energy-efficient terahertz beam training"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, bench_args;

    CLI::App *run_cmd = app.add_subcommand("run", "simulate one configuration");
    add_common(run_cmd, run_args);
    std::string run_scheme;
    std::string q_save, q_load;
    CLI::Option *run_scheme_opt =
        run_cmd->add_option("--scheme", run_scheme,
                            "beam search scheme (exhaustive, random, iterative, "
                            "linear, binary, eetbf)");
    run_cmd->add_option("--q-save", q_save, "write the learned Q-table to this file");
    run_cmd->add_option("--q-load", q_load, "warm-start the Q-table from this file");

    CLI::App *sweep_cmd =
        app.add_subcommand("sweep", "vary one parameter across schemes and seeds");
    add_common(sweep_cmd, sweep_args);
    std::string sweep_param;
    std::vector<std::string> sweep_values, sweep_schemes;
    long sweep_seeds = 1, sweep_workers = 1;
    bool sweep_plot = false;
    sweep_cmd->add_option("--param", sweep_param,
                          "parameter to vary (velocity, t_ti, n_beams, freq, radius, scheme)")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated parameter values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--scheme", sweep_schemes,
                          "comma-separated schemes to compare")
        ->delimiter(',');
    sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--workers", sweep_workers, "parallel worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_flag("--plot", sweep_plot, "also write SVG charts");

    CLI::App *bench_cmd =
        app.add_subcommand("bench", "compare every scheme on one configuration");
    add_common(bench_cmd, bench_args);
    long bench_seeds = 1, bench_workers = 1;
    bench_cmd->add_option("--seeds", bench_seeds, "seeds per scheme")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--workers", bench_workers, "parallel worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            eetbf::ConfigMap cfg = build_config(run_args);
            if (run_scheme_opt->count() > 0) cfg.set("sim.scheme", run_scheme);
            eetbf::RunOptions opt;
            opt.out_dir = run_args.out_dir;
            opt.window_fraction = run_args.window;
            opt.q_save = q_save;
            opt.q_load = q_load;
            return eetbf::cmd_run(cfg, opt);
        }
        if (sweep_cmd->parsed()) {
            eetbf::ConfigMap cfg = build_config(sweep_args);
            eetbf::SweepOptions opt;
            opt.param = sweep_param;
            opt.values = sweep_values;
            opt.schemes = sweep_schemes;
            opt.seeds = sweep_seeds;
            opt.workers = static_cast<int>(sweep_workers);
            opt.window_fraction = sweep_args.window;
            opt.out_dir = sweep_args.out_dir;
            opt.plot = sweep_plot;
            return eetbf::cmd_sweep(cfg, opt);
        }
        eetbf::ConfigMap cfg = build_config(bench_args);
        eetbf::BenchOptions opt;
        opt.seeds = bench_seeds;
        opt.workers = static_cast<int>(bench_workers);
        opt.window_fraction = bench_args.window;
        opt.out_dir = bench_args.out_dir;
        return eetbf::cmd_bench(cfg, opt);
    } catch (const eetbf::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
