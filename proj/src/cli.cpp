#include "dspsa/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dspsa/campaign.hpp"
#include "dspsa/config.hpp"
#include "dspsa/format.hpp"

namespace dspsa::cli {

using nlohmann::json;

namespace {

// Sub-seeds of the master seed, one per independent stream.
constexpr std::uint64_t kTuneStream = 1;
constexpr std::uint64_t kInitialCiStream = 2;
constexpr std::uint64_t kTerminalCiStream = 3;
constexpr std::uint64_t kBaselineStream = 4;
constexpr std::uint64_t kCrnStream = 5;
constexpr std::uint64_t kEvaluateStream = 6;

struct Options {
    std::string mode;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> iterations;
    std::vector<double> theta;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> pairs;
    std::optional<double> desired_step;
    std::optional<std::size_t> samples;
    double r0 = 0.0;
};

class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

config::ExperimentConfig resolve_config(const Options& o) {
    if (o.config_path.empty() && o.mode.empty()) throw config::ConfigError("give --config or --mode");
    config::ExperimentConfig c;
    if (!o.config_path.empty()) {
        c = config::load_experiment(o.config_path);
        if (!o.mode.empty() && epi::to_string(c.mode) != o.mode)
            throw config::ConfigError("--mode " + o.mode + " does not match the config mode " + epi::to_string(c.mode));
    } else {
        try {
            c = config::default_experiment(epi::mode_from_string(o.mode));
        } catch (const std::invalid_argument&) {
            throw config::ConfigError("--mode must be h1n1 or covid");
        }
    }
    if (o.seed) c.seed = *o.seed;
    if (o.runs) {
        if (*o.runs < 1) throw config::ConfigError("--runs must be >= 1");
        c.campaign.runs = *o.runs;
    }
    if (o.iterations) {
        if (*o.iterations < 1) throw config::ConfigError("--iterations must be >= 1");
        c.optimizer.iterations = *o.iterations;
    }
    if (o.desired_step) {
        if (!(*o.desired_step > 0.0)) throw config::ConfigError("--desired-step must be > 0");
        c.optimizer.desired_step = *o.desired_step;
    }
    if (o.samples) {
        if (*o.samples < 1) throw config::ConfigError("--samples must be >= 1");
        c.optimizer.tuning_samples = *o.samples;
    }
    if (o.replicates && *o.replicates < 2) throw config::ConfigError("--replicates must be >= 2");
    if (o.pairs && *o.pairs < 10) throw config::ConfigError("--pairs must be >= 10");
    return c;
}

unsigned resolve_threads(const Options& o) {
    if (o.threads) return std::max(1U, *o.threads);
    if (const char* env = std::getenv("DSPSA_EPI_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw config::ConfigError(std::string("DSPSA_EPI_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

Vector theta_or_default(const Options& o, const config::ExperimentConfig& c) {
    if (o.theta.empty()) return c.optimizer.theta0;
    const std::size_t p = c.mode == epi::Mode::H1N1 ? codec::kH1N1Dim : codec::kCovidDim;
    if (o.theta.size() != p)
        throw config::ConfigError("--theta needs " + std::to_string(p) + " comma-separated components");
    for (double v : o.theta)
        if (v != std::floor(v)) throw config::ConfigError("--theta components must be integers");
    return o.theta;
}

std::filesystem::path prepare_out(const Options& o) {
    std::filesystem::path dir(o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw RuntimeFailure("cannot create output directory " + dir.string());
    return dir;
}

void write_json(const std::filesystem::path& file, const json& j) {
    std::ofstream out(file);
    out << j.dump(2) << '\n';
    if (!out) throw RuntimeFailure("cannot write " + file.string());
}

json plan_json(const cost::EpidemicCostOracle& oracle, std::span<const double> theta) {
    const codec::InterventionPlan plan = oracle.decode(theta);
    return std::visit([](const auto& p) { return json(p); }, plan);
}

double tuned_gain(const config::ExperimentConfig& c, const cost::EpidemicCostOracle& oracle) {
    if (c.optimizer.a) return *c.optimizer.a;
    return tune_initial_gain(oracle, c.optimizer.theta0, codec::box_projection(c.bounds()), c.optimizer.desired_step,
                             c.optimizer.tuning_samples, mix(c.seed, kTuneStream), c.optimizer.crn);
}

std::string percent(double fraction) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * fraction << '%';
    return s.str();
}

int run_optimize(const Options& o, std::ostream& out, std::ostream& err) {
    const config::ExperimentConfig c = resolve_config(o);
    const unsigned threads = resolve_threads(o);
    const auto oracle = c.oracle();
    const std::filesystem::path dir = prepare_out(o);
    err << "master seed: " << c.seed << "\n";

    const double a = tuned_gain(c, *oracle);
    campaign::CampaignConfig cc;
    cc.runs = c.campaign.runs;
    cc.run_config.iterations = c.optimizer.iterations;
    cc.run_config.theta0 = c.optimizer.theta0;
    cc.run_config.gains = c.optimizer.gains(a);
    cc.run_config.crn = c.optimizer.crn;
    cc.projection = codec::box_projection(c.bounds());
    cc.repair = c.repair();
    cc.master_seed = c.seed;
    cc.threads = threads;
    err << "gains: a=" << cc.run_config.gains.a() << " A=" << cc.run_config.gains.A()
        << " alpha=" << cc.run_config.gains.alpha() << (c.optimizer.a ? "" : " (a tuned)") << "\n";
    err << "running " << cc.runs << " trial(s) x " << cc.run_config.iterations << " iterations\n";

    const campaign::CampaignResult result = campaign::run_campaign(cc, *oracle);
    if (result.completed() == 0) {
        for (const auto& t : result.trials) err << "trial " << t.index << " failed: " << t.error << "\n";
        throw RuntimeFailure("every trial failed");
    }
    campaign::write_traces(dir, result);

    const std::size_t n_ci = c.campaign.ci_replicates;
    const auto initial = campaign::terminal_ci(c.optimizer.theta0, *oracle, n_ci, c.campaign.ci_level,
                                               mix(c.seed, kInitialCiStream));
    json trials = json::array();
    std::optional<std::size_t> best;
    std::vector<campaign::ConfidenceInterval> cis(result.trials.size());
    double terminal_sum = 0.0;
    for (const auto& t : result.trials) {
        json tj{{"index", t.index}, {"base_seed", t.base_seed}, {"failed", t.failed}};
        if (t.failed) {
            err << "trial " << t.index << " failed: " << t.error << "\n";
            tj["error"] = t.error;
        } else {
            const Vector solution(t.trace.solution.begin(), t.trace.solution.end());
            cis[t.index] = campaign::terminal_ci(solution, *oracle, n_ci, c.campaign.ci_level,
                                                 mix(c.seed, kTerminalCiStream));
            terminal_sum += cis[t.index].mean;
            tj["solution"] = t.trace.solution;
            tj["plan"] = plan_json(*oracle, solution);
            tj["final_iterate"] = t.trace.final_iterate;
            tj["terminal_ci"] = campaign::to_json(cis[t.index]);
            if (!best || cis[t.index].mean < cis[*best].mean) best = t.index;
        }
        trials.push_back(std::move(tj));
    }
    const double terminal_mean = terminal_sum / static_cast<double>(result.completed());
    const double decrease = 1.0 - terminal_mean / initial.mean;
    const std::size_t window = std::max<std::size_t>(1, c.optimizer.iterations / 20);
    const double trace_decrease = campaign::trace_decrease(result.mean_trace, window);

    const auto& best_trial = result.trials[*best];
    const Vector best_solution(best_trial.trace.solution.begin(), best_trial.trace.solution.end());
    auto plans = c.baselines;
    plans.push_back({"dspsa_terminal", best_solution});
    const auto table = campaign::evaluate_baselines(plans, *oracle, c.campaign.baseline_replicates,
                                                    mix(c.seed, kBaselineStream));
    const auto crn = campaign::crn_probe(*oracle, c.optimizer.theta0, cc.projection, c.campaign.crn_pairs,
                                         mix(c.seed, kCrnStream));

    json baselines = json::array();
    for (const auto& b : table) baselines.push_back(campaign::to_json(b));
    json summary{{"mode", epi::to_string(c.mode)},
                 {"master_seed", c.seed},
                 {"loss_unit", c.loss_unit},
                 {"gains", {{"a", cc.run_config.gains.a()}, {"A", cc.run_config.gains.A()},
                            {"alpha", cc.run_config.gains.alpha()}, {"a_tuned", !c.optimizer.a.has_value()}}},
                 {"crn", c.optimizer.crn},
                 {"runs", cc.runs},
                 {"iterations", cc.run_config.iterations},
                 {"completed_runs", result.completed()},
                 {"initial", {{"theta", c.optimizer.theta0}, {"ci", campaign::to_json(initial)}}},
                 {"trials", trials},
                 {"best", {{"trial", *best}, {"solution", best_trial.trace.solution},
                           {"plan", plan_json(*oracle, best_solution)}, {"ci", campaign::to_json(cis[*best])}}},
                 {"loss_decrease", {{"terminal_vs_initial", decrease}, {"trace_first_vs_last", trace_decrease},
                                    {"trace_window", window}}},
                 {"baselines", baselines},
                 {"crn_probe", campaign::to_json(crn)}};
    write_json(dir / "summary.json", summary);
    write_json(dir / "config.json", config::to_json(c));

    err << "initial mean loss " << format_number(initial.mean) << ", terminal mean loss "
        << format_number(terminal_mean) << " (" << percent(decrease) << " decrease)\n";
    err << "best plan: " << plan_json(*oracle, best_solution).dump() << "\n";
    for (const auto& b : table)
        err << "  " << std::left << std::setw(36) << b.name
            << (b.failed ? "failed: " + b.error : format_number(b.mean) + " +/- " + format_number(b.std_error)) << "\n";

    json line{{"command", "optimize"},      {"status", result.completed() == cc.runs ? "ok" : "partial"},
              {"mode", epi::to_string(c.mode)}, {"seed", c.seed},
              {"out", dir.string()},        {"best_solution", best_trial.trace.solution},
              {"best_mean", cis[*best].mean}, {"loss_decrease", decrease}};
    out << line.dump() << "\n";
    return kExitOk;
}

int run_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
    const config::ExperimentConfig c = resolve_config(o);
    const Vector theta = theta_or_default(o, c);
    const auto oracle = c.oracle();
    const std::size_t n = o.replicates.value_or(c.campaign.ci_replicates);
    const std::uint64_t seed = mix(c.seed, kEvaluateStream);
    err << "master seed: " << c.seed << "\n";

    std::vector<double> y(n);
    std::vector<std::pair<std::string, double>> components;
    for (std::size_t j = 0; j < n; ++j) {
        const cost::CostBreakdown b = oracle->breakdown(theta, mix(seed, j));
        y[j] = b.total / c.loss_unit;
        if (components.empty())
            for (const auto& [name, v] : b.components) components.emplace_back(name, 0.0);
        for (std::size_t i = 0; i < components.size(); ++i) components[i].second += b.components[i].second;
    }
    const auto ci = campaign::confidence_interval(y, c.campaign.ci_level);
    json mean_costs = json::object();
    for (auto& [name, v] : components) mean_costs[name] = v / static_cast<double>(n);

    json result{{"mode", epi::to_string(c.mode)}, {"master_seed", c.seed},
                {"theta", theta},                {"plan", plan_json(*oracle, theta)},
                {"loss_unit", c.loss_unit},      {"ci", campaign::to_json(ci)},
                {"mean_cost_usd", mean_costs}};
    if (!o.out_dir.empty()) write_json(prepare_out(o) / "evaluation.json", result);

    err << "plan: " << result["plan"].dump() << "\n";
    err << "mean loss " << format_number(ci.mean) << ", " << percent(ci.level) << " CI [" << format_number(ci.lo)
        << ", " << format_number(ci.hi) << "], min " << format_number(ci.sample_min) << ", max "
        << format_number(ci.sample_max) << "\n";
    for (const auto& [name, v] : mean_costs.items()) err << "  " << name << ": " << format_number(v.get<double>()) << "\n";
    out << json{{"command", "evaluate"}, {"status", "ok"}, {"mean", ci.mean}, {"lo", ci.lo}, {"hi", ci.hi}, {"n", n}}.dump()
        << "\n";
    return kExitOk;
}

int run_baselines(const Options& o, std::ostream& out, std::ostream& err) {
    config::ExperimentConfig c = resolve_config(o);
    if (!o.theta.empty()) c.baselines.push_back({"candidate", theta_or_default(o, c)});
    if (c.baselines.empty()) throw config::ConfigError("no baseline plans configured");
    const auto oracle = c.oracle();
    const std::size_t n = o.replicates.value_or(c.campaign.baseline_replicates);
    err << "master seed: " << c.seed << "\n";
    const auto table = campaign::evaluate_baselines(c.baselines, *oracle, n, mix(c.seed, kBaselineStream));

    json rows = json::array();
    for (const auto& b : table) {
        rows.push_back(campaign::to_json(b));
        err << "  " << std::left << std::setw(36) << b.name
            << (b.failed ? "failed: " + b.error : format_number(b.mean) + " +/- " + format_number(b.std_error)) << "\n";
    }
    if (!o.out_dir.empty())
        write_json(prepare_out(o) / "baselines.json",
                   {{"mode", epi::to_string(c.mode)}, {"master_seed", c.seed}, {"n", n}, {"baselines", rows}});
    json ranking = json::array();
    for (const auto& b : table) ranking.push_back(b.name);
    out << json{{"command", "baselines"}, {"status", "ok"}, {"ranking", ranking}}.dump() << "\n";
    return kExitOk;
}

int run_crn_probe(const Options& o, std::ostream& out, std::ostream& err) {
    const config::ExperimentConfig c = resolve_config(o);
    const Vector theta = theta_or_default(o, c);
    const auto oracle = c.oracle();
    const std::size_t pairs = o.pairs.value_or(c.campaign.crn_pairs);
    err << "master seed: " << c.seed << "\n";
    const auto r = campaign::crn_probe(*oracle, theta, codec::box_projection(c.bounds()), pairs, mix(c.seed, kCrnStream));
    const json rj = campaign::to_json(r);
    if (!o.out_dir.empty()) write_json(prepare_out(o) / "crn_probe.json", rj);
    if (r.degenerate)
        err << "degenerate sample (zero variance); no recommendation\n";
    else
        err << "correlation " << format_number(r.correlation) << ", one-sided p = " << format_number(r.p_value)
            << ": " << (*r.recommend_crn ? "use" : "do not use") << " common random numbers\n";
    json line{{"command", "crn-probe"}, {"status", "ok"}};
    line.update(rj);
    out << line.dump() << "\n";
    return kExitOk;
}

int run_tune_gain(const Options& o, std::ostream& out, std::ostream& err) {
    config::ExperimentConfig c = resolve_config(o);
    c.optimizer.a.reset();
    const auto oracle = c.oracle();
    err << "master seed: " << c.seed << "\n";
    const double a = tuned_gain(c, *oracle);
    err << "a = " << format_number(a) << " for a first step of " << format_number(c.optimizer.desired_step) << "\n";
    const json line{{"command", "tune-gain"},
                    {"status", "ok"},
                    {"a", a},
                    {"desired_step", c.optimizer.desired_step},
                    {"samples", c.optimizer.tuning_samples}};
    if (!o.out_dir.empty()) write_json(prepare_out(o) / "gain.json", line);
    out << line.dump() << "\n";
    return kExitOk;
}

int run_herd_check(const Options& o, std::ostream& out, std::ostream& err) {
    if (!(o.r0 > 0.0)) throw config::ConfigError("--r0 must be > 0");
    const double h = campaign::herd_threshold(o.r0);
    err << "herd immunity threshold at R0 = " << format_number(o.r0) << ": " << percent(h) << "\n";
    out << json{{"command", "herd-check"}, {"status", "ok"}, {"r0", o.r0}, {"threshold", h}, {"percent", percent(h)}}.dump()
        << "\n";
    return kExitOk;
}

} // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete stochastic optimization of epidemic intervention plans", "dspsa_epi"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool writes_required) {
        sub->add_option("--mode", o.mode, "h1n1 or covid")->check(CLI::IsMember({"h1n1", "covid"}));
        sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
        auto* out_opt = sub->add_option("--out", o.out_dir, "Output directory");
        if (writes_required) out_opt->required();
        sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
    };

    auto* optimize = app.add_subcommand("optimize", "Run optimizer trials and write the results directory");
    add_common(optimize, true);
    optimize->add_option("--threads", o.threads, "Maximum worker threads (also DSPSA_EPI_THREADS)");
    optimize->add_option("--runs", o.runs, "Number of trials (overrides the config)");
    optimize->add_option("--iterations", o.iterations, "Iterations per trial (overrides the config)");

    auto* evaluate = app.add_subcommand("evaluate", "Confidence interval of the loss at one plan");
    add_common(evaluate, false);
    evaluate->add_option("--theta", o.theta, "Integer plan vector, comma separated")->delimiter(',');
    evaluate->add_option("--replicates", o.replicates, "Number of simulations");

    auto* baselines = app.add_subcommand("baselines", "Rank the configured baseline plans");
    add_common(baselines, false);
    baselines->add_option("--theta", o.theta, "Extra candidate plan, comma separated")->delimiter(',');
    baselines->add_option("--replicates", o.replicates, "Simulations per plan");

    auto* crn = app.add_subcommand("crn-probe", "Test whether paired evaluations are positively correlated");
    add_common(crn, false);
    crn->add_option("--theta", o.theta, "Probe point, comma separated (default: theta0)")->delimiter(',');
    crn->add_option("--pairs", o.pairs, "Number of perturbation pairs");

    auto* tune = app.add_subcommand("tune-gain", "Estimate the gain numerator a at theta0");
    add_common(tune, false);
    tune->add_option("--desired-step", o.desired_step, "Desired magnitude of the first step");
    tune->add_option("--samples", o.samples, "Number of gradient samples");

    auto* herd = app.add_subcommand("herd-check", "Print the herd immunity threshold 1 - 1/R0");
    herd->add_option("--r0", o.r0, "Basic reproduction number")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (optimize->parsed()) return run_optimize(o, out, err);
        if (evaluate->parsed()) return run_evaluate(o, out, err);
        if (baselines->parsed()) return run_baselines(o, out, err);
        if (crn->parsed()) return run_crn_probe(o, out, err);
        if (tune->parsed()) return run_tune_gain(o, out, err);
        return run_herd_check(o, out, err);
    } catch (const config::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

} // namespace dspsa::cli
