#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mnl/errors.hpp"

using namespace mnl;
using namespace mnl::cli;

namespace {

void add_run_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--data", cfg.data, "Price CSV with header date,adj_close");
    app.add_option_function<std::string>(
           "--arch", [&cfg](const std::string& v) { cfg.arch = parse_arch(v); }, "Recurrent cell: lstm or gru")
        ->check(CLI::IsMember({"lstm", "gru"}));
    app.add_option("--window", cfg.window, "Input window length w")->capture_default_str();
    app.add_option("--select-window", cfg.select_window,
                   "Window used to score the population (0: same as --window)")
        ->capture_default_str();
    app.add_option("--hidden", cfg.hidden, "Hidden width of both units")->capture_default_str();
    app.add_option("--n-train", cfg.n_train, "Number of leading returns in the training split")
        ->capture_default_str();
    app.add_option("--population", cfg.population, "Agents trained before selection")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app.add_option("--l-levels", cfg.l_levels, "Interval widths, comma separated")->delimiter(',');
    app.add_option("--epochs", cfg.optim.epochs)->capture_default_str();
    app.add_option("--learning-rate", cfg.optim.learning_rate)->capture_default_str();
    app.add_option("--gamma", cfg.optim.gamma)->capture_default_str();
    app.add_option("--lr-inc", cfg.optim.lr_inc)->capture_default_str();
    app.add_option("--lr-dec", cfg.optim.lr_dec)->capture_default_str();
    app.add_option("--lr-min", cfg.optim.lr_min)->capture_default_str();
    app.add_option("--lr-max", cfg.optim.lr_max)->capture_default_str();
    app.add_option("--l2", cfg.optim.l2_lambda, "L2 penalty on weights")->capture_default_str();
    app.add_option("--clip", cfg.optim.clip_threshold, "Per-element gradient clip")->capture_default_str();
    app.add_option("--minibatch", cfg.optim.minibatch_size)->capture_default_str();
    app.add_flag("--plain-rmsprop{true}", "Disable sign-driven rate adaptation")
        ->each([&cfg](const std::string& v) { cfg.optim.adaptive_rates = v != "true"; });
    app.add_flag("--dpu-bias-zero{true}", "Start the DPU output bias at 0")
        ->each([&cfg](const std::string& v) { cfg.optim.dpu_bias_at_target_mean = v != "true"; });
    app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const CompatibilityError*>(&e) != nullptr) return exit_compatibility;
    if (dynamic_cast<const DataError*>(&e) != nullptr) return exit_data;
    if (dynamic_cast<const NumericalError*>(&e) != nullptr) return exit_numerical;
    if (dynamic_cast<const DomainError*>(&e) != nullptr) return exit_numerical;
    if (dynamic_cast<const ParameterError*>(&e) != nullptr) return exit_config;
    return exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular recurrent agent for return and volatility interval prediction"};
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_config("--config", "", "Flat key = value file; flags given on the command line win");
    app.require_subcommand(0, 1);
    app.footer(
        "Exit status: 0 ok, 1 unexpected failure, 2 usage or config error, 3 data error,\n"
        "4 numerical failure, 5 agent/config incompatibility.");

    RunConfig cfg;
    add_run_options(app, cfg);
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

    EvaluateRequest req;
    auto add_agent_options = [&req](CLI::App* sub) {
        sub->add_option("--agent", req.agent, "Agent file written by train")->required();
        sub->add_option("--split", req.split, "train, test or both")->capture_default_str();
    };

    CLI::App* train = app.add_subcommand("train", "Select the best agent of a population and save it");
    CLI::App* evaluate = app.add_subcommand("evaluate", "Coverage, RMSE and accuracy of an agent per split");
    add_agent_options(evaluate);
    CLI::App* sweep = app.add_subcommand("sweep-window", "Retrain the selected seed across window lengths");
    std::vector<std::size_t> windows{2, 5, 10, 15, 20, 25, 30};
    sweep->add_option("--windows", windows, "Window lengths, comma separated")->delimiter(',');
    CLI::App* intervals = app.add_subcommand("export-intervals", "Write the interval series of one split");
    add_agent_options(intervals);
    double level = 2.0;
    intervals->add_option("--l", level, "Interval width")->capture_default_str();
    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic GARCH(1,1) price series");
    std::filesystem::path synth_path;
    std::size_t synth_n = 17113;
    std::uint64_t synth_seed = 20180104;
    synth->add_option("--path", synth_path, "Output CSV")->required();
    synth->add_option("--n", synth_n, "Number of prices")->capture_default_str();
    synth->add_option("--series-seed", synth_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    if (sweep->parsed() && app.get_option("--l-levels")->count() == 0) {
        cfg.l_levels = {1.0};
    }
    if (print_config) {
        std::cout << cfg.canonical();
        return exit_ok;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return exit_config;
    }
    if (evaluate->parsed() || intervals->parsed()) {
        if (app.get_option("--arch")->count() > 0) req.expect_arch = cfg.arch;
        if (app.get_option("--window")->count() > 0) req.expect_window = cfg.window;
    }

    try {
        if (train->parsed()) cmd_train(cfg, std::cout);
        if (evaluate->parsed()) cmd_evaluate(cfg, req, std::cout);
        if (sweep->parsed()) cmd_sweep_window(cfg, windows, std::cout);
        if (intervals->parsed()) cmd_export_intervals(cfg, req, level, std::cout);
        if (synth->parsed()) cmd_synth(synth_path, synth_n, synth_seed, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "mnl: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return exit_ok;
}
