#pragma once

// Experiment orchestration: repeated optimizer trials, terminal confidence
// intervals, baseline comparisons and the common-random-numbers probe.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspsa/dspsa.hpp"

namespace dspsa::campaign {

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    double sample_min = 0.0;
    double sample_max = 0.0;
    double std_dev = 0.0;
    double level = 0.95;
};

/// Student-t interval mean +/- t_{n-1,(1+level)/2} s / sqrt(n).
ConfidenceInterval confidence_interval(std::span<const double> samples, double level);

/// n independent oracle evaluations at the solution, seeds mix(seed, j).
ConfidenceInterval terminal_ci(std::span<const double> solution, const NoisyLossOracle& oracle, std::size_t n,
                               double level, std::uint64_t seed);

struct NamedPoint {
    std::string name;
    Vector theta;
};

struct BaselineResult {
    std::string name;
    Vector theta;
    std::size_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
    bool failed = false;
    std::string error;
};

/// Every plan is evaluated on the same seeds mix(seed, j), j < n. A failing plan
/// is reported and does not affect the others. Results are sorted by mean cost
/// (failed plans last).
std::vector<BaselineResult> evaluate_baselines(const std::vector<NamedPoint>& plans, const NoisyLossOracle& oracle,
                                               std::size_t n, std::uint64_t seed);

struct CrnProbeResult {
    std::size_t n_pairs = 0;
    double correlation = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;  // one-sided, H1: correlation > 0
    bool degenerate = false;
    /// Empty when the sample is degenerate.
    std::optional<bool> recommend_crn;
};

/// Evaluates n_pairs (theta+, theta-) pairs around the midpoint of theta with a
/// shared seed per pair and tests for positive correlation at the 5% level.
CrnProbeResult crn_probe(const NoisyLossOracle& oracle, std::span<const double> theta, const Projection& project,
                         std::size_t n_pairs, std::uint64_t seed, double significance = 0.05);

/// 1 - 1/R0.
double herd_threshold(double R0);

struct CampaignConfig {
    std::size_t runs = 1;
    RunConfig run_config;
    Projection projection;
    Repair repair;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    void validate() const;
};

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t base_seed = 0;
    bool failed = false;
    std::string error;
    RunTrace trace;
};

struct CampaignResult {
    std::vector<TrialResult> trials;
    /// Per iteration, mean of (y+ + y-)/2 over the trials that completed.
    std::vector<double> mean_trace;

    std::size_t completed() const;
};

/// Seed of trial i: mix(master_seed ^ trial salt, i).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index);

CampaignResult run_campaign(const CampaignConfig& config, const NoisyLossOracle& oracle);

/// 1 - mean(last window of the averaged trace) / mean(first window).
double trace_decrease(std::span<const double> mean_trace, std::size_t window);

/// Writes trace_trial_<i>.csv for every completed trial and trace_mean.csv.
void write_traces(const std::filesystem::path& dir, const CampaignResult& result);

nlohmann::json to_json(const ConfidenceInterval& ci);
nlohmann::json to_json(const BaselineResult& b);
nlohmann::json to_json(const CrnProbeResult& r);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace dspsa::campaign
