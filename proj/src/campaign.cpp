#include "dspsa/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "dspsa/format.hpp"

namespace dspsa::campaign {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1);
}

nlohmann::json vector_json(std::span<const double> v) { return nlohmann::json(std::vector<double>(v.begin(), v.end())); }

} // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

ConfidenceInterval confidence_interval(std::span<const double> samples, double level) {
    if (samples.size() < 2) throw std::invalid_argument("confidence_interval: need at least 2 samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
    ConfidenceInterval ci;
    ci.n = samples.size();
    ci.level = level;
    ci.mean = mean_of(samples);
    ci.std_dev = std::sqrt(sample_variance(samples, ci.mean));
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    ci.sample_min = *mn;
    ci.sample_max = *mx;
    const boost::math::students_t dist(static_cast<double>(ci.n - 1));
    const double t = boost::math::quantile(dist, 0.5 * (1.0 + level));
    ci.half_width = t * ci.std_dev / std::sqrt(static_cast<double>(ci.n));
    ci.lo = ci.mean - ci.half_width;
    ci.hi = ci.mean + ci.half_width;
    // Rounding in the mean can push it a hair outside the sample range.
    ci.mean = std::clamp(ci.mean, ci.sample_min, ci.sample_max);
    return ci;
}

ConfidenceInterval terminal_ci(std::span<const double> solution, const NoisyLossOracle& oracle, std::size_t n,
                               double level, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("terminal_ci: n must be >= 2");
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = oracle.evaluate(solution, mix(seed, j));
    return confidence_interval(y, level);
}

std::vector<BaselineResult> evaluate_baselines(const std::vector<NamedPoint>& plans, const NoisyLossOracle& oracle,
                                               std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("evaluate_baselines: n must be >= 2");
    std::vector<BaselineResult> out;
    out.reserve(plans.size());
    for (const NamedPoint& plan : plans) {
        BaselineResult r;
        r.name = plan.name;
        r.theta = plan.theta;
        r.n = n;
        try {
            std::vector<double> y(n);
            for (std::size_t j = 0; j < n; ++j) y[j] = oracle.evaluate(plan.theta, mix(seed, j));
            r.mean = mean_of(y);
            r.std_error = std::sqrt(sample_variance(y, r.mean) / static_cast<double>(n));
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const BaselineResult& a, const BaselineResult& b) {
        if (a.failed != b.failed) return !a.failed;
        return a.mean < b.mean;
    });
    return out;
}

CrnProbeResult crn_probe(const NoisyLossOracle& oracle, std::span<const double> theta, const Projection& project,
                         std::size_t n_pairs, std::uint64_t seed, double significance) {
    if (n_pairs < 10) throw std::invalid_argument("crn_probe: n_pairs must be >= 10");
    const Vector mid = midpoint(theta, project);
    Engine perturbations = make_engine(mix(seed ^ kPerturbationSalt, 0));
    std::vector<double> plus(n_pairs), minus(n_pairs);
    for (std::size_t j = 0; j < n_pairs; ++j) {
        const PerturbationDraw delta = draw_perturbation(mid.size(), perturbations);
        const EvaluatedPair pair = eval_pair(mid, delta, oracle, /*crn=*/true, j, seed);
        plus[j] = pair.y_plus;
        minus[j] = pair.y_minus;
    }

    CrnProbeResult r;
    r.n_pairs = n_pairs;
    const double mp = mean_of(plus), mm = mean_of(minus);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t j = 0; j < n_pairs; ++j) {
        sxy += (plus[j] - mp) * (minus[j] - mm);
        sxx += (plus[j] - mp) * (plus[j] - mp);
        syy += (minus[j] - mm) * (minus[j] - mm);
    }
    if (!(sxx > 0.0 && syy > 0.0)) {
        r.degenerate = true;
        return r;
    }
    r.correlation = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n_pairs - 2);
    const double one_minus_r2 = 1.0 - r.correlation * r.correlation;
    if (one_minus_r2 <= 0.0) {
        r.t_statistic = r.correlation > 0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
        r.p_value = r.correlation > 0 ? 0.0 : 1.0;
    } else {
        r.t_statistic = r.correlation * std::sqrt(df / one_minus_r2);
        r.p_value = boost::math::cdf(boost::math::complement(boost::math::students_t(df), r.t_statistic));
    }
    r.recommend_crn = r.p_value < significance;
    return r;
}

double herd_threshold(double R0) {
    if (!(R0 > 0.0)) throw std::invalid_argument("herd_threshold: R0 must be > 0");
    return 1.0 - 1.0 / R0;
}

void CampaignConfig::validate() const {
    if (runs < 1) throw std::invalid_argument("campaign: runs must be >= 1");
    if (!projection) throw std::invalid_argument("campaign: projection is required");
    if (threads < 1) throw std::invalid_argument("campaign: threads must be >= 1");
    run_config.validate();
}

std::size_t CampaignResult::completed() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return !t.failed; }));
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) { return mix(master_seed ^ kTrialSalt, index); }

CampaignResult run_campaign(const CampaignConfig& config, const NoisyLossOracle& oracle) {
    config.validate();
    CampaignResult result;
    result.trials.resize(config.runs);
    const unsigned threads = oracle.concurrent_safe() ? config.threads : 1U;

    parallel_for(config.runs, threads, [&](std::size_t i) {
        TrialResult& trial = result.trials[i];
        trial.index = i;
        trial.base_seed = trial_seed(config.master_seed, i);
        RunConfig rc = config.run_config;
        rc.base_seed = trial.base_seed;
        try {
            trial.trace = run(rc, oracle, config.projection, RunOptions{config.repair, {}, true});
        } catch (const std::exception& e) {
            trial.failed = true;
            trial.error = e.what();
        }
    });

    const std::size_t m = config.run_config.iterations;
    result.mean_trace.assign(m, 0.0);
    std::size_t ok = 0;
    for (const TrialResult& t : result.trials) {
        if (t.failed) continue;
        ++ok;
        for (std::size_t k = 0; k < m; ++k)
            result.mean_trace[k] += 0.5 * (t.trace.records[k].y_plus + t.trace.records[k].y_minus);
    }
    if (ok == 0)
        result.mean_trace.clear();
    else
        for (double& v : result.mean_trace) v /= static_cast<double>(ok);
    return result;
}

double trace_decrease(std::span<const double> mean_trace, std::size_t window) {
    if (mean_trace.empty() || window == 0) throw std::invalid_argument("trace_decrease: empty trace or window");
    window = std::min(window, mean_trace.size());
    const double first = mean_of(mean_trace.first(window));
    const double last = mean_of(mean_trace.last(window));
    return 1.0 - last / first;
}

void write_traces(const std::filesystem::path& dir, const CampaignResult& result) {
    std::filesystem::create_directories(dir);
    for (const TrialResult& t : result.trials) {
        if (t.failed) continue;
        std::ostringstream name;
        name << "trace_trial_" << std::setw(3) << std::setfill('0') << t.index << ".csv";
        std::ofstream out(dir / name.str());
        write_trace_csv(out, t.trace.records);
    }
    std::ofstream mean(dir / "trace_mean.csv");
    mean << "k,mean_loss\n";
    for (std::size_t k = 0; k < result.mean_trace.size(); ++k)
        mean << k << ',' << format_number(result.mean_trace[k]) << '\n';
}

nlohmann::json to_json(const ConfidenceInterval& ci) {
    return {{"mean", ci.mean},       {"half_width", ci.half_width}, {"lo", ci.lo},
            {"hi", ci.hi},           {"n", ci.n},                   {"level", ci.level},
            {"std_dev", ci.std_dev}, {"sample_min", ci.sample_min}, {"sample_max", ci.sample_max}};
}

nlohmann::json to_json(const BaselineResult& b) {
    nlohmann::json j{{"name", b.name}, {"theta", vector_json(b.theta)}, {"n", b.n}};
    if (b.failed) {
        j["failed"] = true;
        j["error"] = b.error;
    } else {
        j["mean"] = b.mean;
        j["std_error"] = b.std_error;
    }
    return j;
}

nlohmann::json to_json(const CrnProbeResult& r) {
    nlohmann::json j{{"n_pairs", r.n_pairs}, {"degenerate", r.degenerate}};
    if (!r.degenerate) {
        j["correlation"] = r.correlation;
        j["t_statistic"] = r.t_statistic;
        j["p_value"] = r.p_value;
        j["recommend_crn"] = *r.recommend_crn;
    }
    return j;
}

} // namespace dspsa::campaign
