#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mnl/data.hpp"
#include "mnl/errors.hpp"
#include "mnl/evaluate.hpp"
#include "mnl/population.hpp"
#include "mnl/report.hpp"
#include "mnl/serialize.hpp"
#include "mnl/synthetic.hpp"

namespace mnl::cli {

void RunConfig::validate() const {
    optim.validate();
    if (window < 2) throw ParameterError("window must be >= 2");
    if (select_window == 1) throw ParameterError("select-window must be >= 2");
    if (hidden < 1) throw ParameterError("hidden must be >= 1");
    if (population < 1) throw ParameterError("population must be >= 1");
    if (n_train < 1) throw ParameterError("n-train must be >= 1");
    if (l_levels.empty()) throw ParameterError("l-levels must not be empty");
    for (double l : l_levels) {
        if (!(l > 0.0)) throw ParameterError("l-levels must be > 0");
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream s;
    std::string levels;
    for (double l : l_levels) {
        levels += (levels.empty() ? "" : ",") + format_real(l);
    }
    s << "arch = " << to_string(arch) << '\n'
      << "window = " << window << '\n'
      << "select-window = " << select_window << '\n'
      << "hidden = " << hidden << '\n'
      << "n-train = " << n_train << '\n'
      << "population = " << population << '\n'
      << "seed = " << seed << '\n'
      << "l-levels = " << levels << '\n'
      << "epochs = " << optim.epochs << '\n'
      << "learning-rate = " << format_real(optim.learning_rate) << '\n'
      << "gamma = " << format_real(optim.gamma) << '\n'
      << "lr-inc = " << format_real(optim.lr_inc) << '\n'
      << "lr-dec = " << format_real(optim.lr_dec) << '\n'
      << "lr-min = " << format_real(optim.lr_min) << '\n'
      << "lr-max = " << format_real(optim.lr_max) << '\n'
      << "l2 = " << format_real(optim.l2_lambda) << '\n'
      << "clip = " << format_real(optim.clip_threshold) << '\n'
      << "minibatch = " << optim.minibatch_size << '\n'
      << "plain-rmsprop = " << (optim.adaptive_rates ? "false" : "true") << '\n'
      << "dpu-bias-zero = " << (optim.dpu_bias_at_target_mean ? "false" : "true") << '\n';
    return s.str();
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::missing_file, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Inputs {
    TrainTestSplit split;
    /// Digest of the canonical config plus the data file contents.
    std::string digest;
};

Inputs load_inputs(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.data.empty()) {
        throw ParameterError("--data is required");
    }
    const std::string text = read_file(cfg.data);
    const ReturnSeries returns = log_returns(parse_prices(text));
    if (cfg.n_train >= returns.size()) {
        throw DataError(DataErrorKind::insufficient_data,
                        "n-train = " + std::to_string(cfg.n_train) + " leaves no test returns (" +
                            std::to_string(returns.size()) + " returns in '" + cfg.data.string() + "')");
    }
    Inputs in;
    in.split = split(returns, SplitSpec{cfg.n_train});
    in.digest = fnv1a_hex(cfg.canonical() + "data = " + fnv1a_hex(text) + '\n');
    return in;
}

std::string epochs_tag(const RunConfig& cfg) { return "epochs=" + std::to_string(cfg.optim.epochs); }

PopulationSpec population_spec(const RunConfig& cfg, std::size_t window) {
    PopulationSpec spec;
    spec.arch = cfg.arch;
    spec.window = window;
    spec.hidden = cfg.hidden;
    spec.population = cfg.population;
    spec.master_seed = cfg.seed;
    spec.threads = cfg.threads;
    return spec;
}

/// Population selection at `select_window`, the winner retrained at
/// `window` when the two differ.
struct Chosen {
    Selection selection;
    Agent agent;
};

Chosen choose(const RunConfig& cfg, const ReturnSeries& train, std::size_t select_window, std::size_t window) {
    Chosen c;
    c.selection = select_best(train.values, population_spec(cfg, select_window), cfg.optim, cfg.l_levels);
    if (select_window == window) {
        c.agent = c.selection.best;
    } else {
        const std::uint64_t seed = c.selection.members[c.selection.best_index].seed;
        c.agent = train_agent(train.values, cfg.arch, window, cfg.hidden, cfg.optim, Rng(seed)).agent;
    }
    return c;
}

void check_compatible(const Agent& agent, const EvaluateRequest& req) {
    agent.validate();
    if (req.expect_arch && *req.expect_arch != agent.arch) {
        throw CompatibilityError("agent file '" + req.agent.string() + "' holds a " + std::string(to_string(agent.arch)) +
                                 " agent, but --arch " + std::string(to_string(*req.expect_arch)) + " was requested");
    }
    if (req.expect_window && *req.expect_window != agent.window) {
        throw CompatibilityError("agent file '" + req.agent.string() + "' uses window " +
                                 std::to_string(agent.window) + ", but --window " +
                                 std::to_string(*req.expect_window) + " was requested");
    }
}

void require_segment(const Agent& agent, const ReturnSeries& segment, const std::string& name) {
    if (segment.size() <= 2 * agent.window) {
        throw DataError(DataErrorKind::insufficient_data, name + " split has " + std::to_string(segment.size()) +
                                                              " returns; window " + std::to_string(agent.window) +
                                                              " needs more than " +
                                                              std::to_string(2 * agent.window));
    }
}

std::vector<std::string> splits_of(const std::string& split) {
    if (split == "both") return {"train", "test"};
    if (split == "train" || split == "test") return {split};
    throw ParameterError("--split must be train, test or both (got '" + split + "')");
}

const ReturnSeries& segment_of(const Inputs& in, const std::string& name) {
    return name == "train" ? in.split.train : in.split.test;
}

std::string agent_tag(const Agent& agent) {
    return "agent_digest=" + (agent.provenance.config_digest.empty() ? "-" : agent.provenance.config_digest);
}

}  // namespace

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    const Inputs in = load_inputs(cfg);
    const std::size_t select_window = cfg.select_window == 0 ? cfg.window : cfg.select_window;
    Chosen c = choose(cfg, in.split.train, select_window, cfg.window);
    c.agent.provenance.config_digest = in.digest;

    std::filesystem::create_directories(cfg.out);
    const std::uint64_t seed = c.agent.provenance.seed;
    const std::string header = header_line("train", seed, in.digest, epochs_tag(cfg));
    save_agent(cfg.out / "agent.txt", c.agent);
    write_text(cfg.out / "population.csv", population_csv(header, c.selection.members));
    write_text(cfg.out / "summary.csv", population_summary_csv(header, c.selection.members));

    const MemberSummary& best = c.selection.members[c.selection.best_index];
    char line[160];
    std::snprintf(line, sizeof(line), "selected agent %zu of %zu (seed %llu, score %.6f)\n", c.selection.best_index,
                  c.selection.members.size(), static_cast<unsigned long long>(best.seed), best.report.score);
    log << line;
}

void cmd_evaluate(const RunConfig& cfg, const EvaluateRequest& req, std::ostream& log) {
    const Inputs in = load_inputs(cfg);
    const Agent agent = load_agent(req.agent);
    check_compatible(agent, req);

    std::vector<SplitReport> reports;
    for (const std::string& name : splits_of(req.split)) {
        const ReturnSeries& segment = segment_of(in, name);
        require_segment(agent, segment, name);
        reports.push_back({name, evaluate(agent, segment.values, cfg.l_levels)});
    }
    std::filesystem::create_directories(cfg.out);
    const std::string header =
        header_line("evaluate", agent.provenance.seed, in.digest, epochs_tag(cfg) + " " + agent_tag(agent));
    write_text(cfg.out / "evaluation.csv", evaluation_csv(header, reports));
    for (const auto& r : reports) {
        log << r.split << ":";
        for (const auto& [l, p] : r.report.coverage) log << " p(" << l << ")=" << p;
        log << " score=" << r.report.score << '\n';
    }
}

void cmd_sweep_window(const RunConfig& cfg, const std::vector<std::size_t>& windows, std::ostream& log) {
    if (windows.empty()) throw ParameterError("--windows must not be empty");
    for (std::size_t w : windows) {
        if (w < 2) throw ParameterError("sweep windows must be >= 2");
    }
    const Inputs in = load_inputs(cfg);
    std::size_t select_window = cfg.select_window;
    if (select_window == 0) {
        select_window = *std::min_element(windows.begin(), windows.end());
    }
    const Selection sel =
        select_best(in.split.train.values, population_spec(cfg, select_window), cfg.optim, cfg.l_levels);
    const std::uint64_t seed = sel.members[sel.best_index].seed;

    std::vector<SweepRow> rows;
    for (std::size_t w : windows) {
        const Agent agent = w == select_window
                                ? sel.best
                                : train_agent(in.split.train.values, cfg.arch, w, cfg.hidden, cfg.optim, Rng(seed)).agent;
        require_segment(agent, in.split.train, "train");
        require_segment(agent, in.split.test, "test");
        const EvalReport train = evaluate(agent, in.split.train.values, cfg.l_levels);
        const EvalReport test = evaluate(agent, in.split.test.values, cfg.l_levels);
        for (double l : cfg.l_levels) {
            rows.push_back({w, l, train, test});
        }
        log << "window " << w << ": train p(" << cfg.l_levels.front() << ")=" << train.coverage.front().second
            << " test p(" << cfg.l_levels.front() << ")=" << test.coverage.front().second << '\n';
    }
    std::filesystem::create_directories(cfg.out);
    const std::string header = header_line("sweep-window", seed, in.digest,
                                           epochs_tag(cfg) + " select_window=" + std::to_string(select_window));
    write_text(cfg.out / "sweep.csv", sweep_csv(header, rows));
}

void cmd_export_intervals(const RunConfig& cfg, const EvaluateRequest& req, double l, std::ostream& log) {
    if (!(l > 0.0)) throw ParameterError("--l must be > 0");
    const auto names = splits_of(req.split);
    if (names.size() != 1) throw ParameterError("export-intervals needs --split train or --split test");
    const Inputs in = load_inputs(cfg);
    const Agent agent = load_agent(req.agent);
    check_compatible(agent, req);
    const ReturnSeries& segment = segment_of(in, names.front());
    require_segment(agent, segment, names.front());

    const auto rows = interval_series(agent, segment, l);
    std::filesystem::create_directories(cfg.out);
    const std::string header = header_line("export-intervals", agent.provenance.seed, in.digest,
                                           "split=" + names.front() + " l=" + format_real(l) + " " + agent_tag(agent));
    const auto path = cfg.out / ("intervals_" + names.front() + ".csv");
    write_text(path, intervals_csv(header, rows));
    log << "wrote " << rows.size() << " rows to " << path.string() << '\n';
}

void cmd_synth(const std::filesystem::path& path, std::size_t n_prices, std::uint64_t seed, std::ostream& log) {
    GarchSpec spec;
    spec.seed = seed;
    const PriceSeries prices = synthetic_garch_prices(spec, n_prices);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_prices(path, prices);
    log << "wrote " << prices.rows.size() << " prices to " << path.string() << '\n';
}

}  // namespace mnl::cli
