#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "dspsa/campaign.hpp"
#include "dspsa/codec.hpp"

using namespace dspsa;
using namespace dspsa::campaign;

namespace {

double gaussian(std::uint64_t seed) {
    Engine rng = make_engine(seed);
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Student-t 97.5% quantile from the normal quantile by the Cornish-Fisher
// expansion in 1/df, accurate to ~1e-6 for df in the hundreds.
double t975(double df) {
    const double z = 1.959963984540054;
    const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
    return z + (z3 + z) / (4 * df) + (5 * z5 + 16 * z3 + 3 * z) / (96 * df * df) +
           (3 * z7 + 19 * z5 + 17 * z3 - 15 * z) / (384 * df * df * df);
}

FunctionOracle quadratic_with_noise(double sigma) {
    return FunctionOracle([sigma](std::span<const double> t, std::uint64_t seed) {
        double s = 0.0;
        for (double v : t) s += (v - 2.3) * (v - 2.3);
        return s + sigma * gaussian(seed);
    });
}

CampaignConfig small_campaign(std::size_t runs, unsigned threads) {
    CampaignConfig c;
    c.runs = runs;
    c.run_config.iterations = 300;
    c.run_config.theta0 = {8, -4, 0};
    c.run_config.gains = GainSchedule(0.2, 30, 0.602);
    c.projection = codec::box_projection(codec::BoxBounds({-10, -10, -10}, {10, 10, 10}));
    c.master_seed = 99;
    c.threads = threads;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("confidence interval of a constant sample is a point") {
    const std::vector<double> c(50, 3.25);
    const ConfidenceInterval ci = confidence_interval(c, 0.95);
    CHECK(ci.mean == 3.25);
    CHECK(ci.lo == 3.25);
    CHECK(ci.hi == 3.25);
    CHECK(ci.half_width == 0.0);
    CHECK(ci.sample_min == 3.25);
    CHECK(ci.sample_max == 3.25);
    CHECK(ci.n == 50);

    const FunctionOracle constant([](std::span<const double>, std::uint64_t) { return 7.0; });
    const ConfidenceInterval t = terminal_ci(Vector{1, 2}, constant, 20, 0.95, 4);
    CHECK(t.lo == 7.0);
    CHECK(t.hi == 7.0);
}

TEST_CASE("confidence interval matches the t formula") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const ConfidenceInterval ci = confidence_interval(x, 0.95);
    // t_{9, 0.975} = 2.262157, s = sqrt(55/6)
    const double half = 2.2621571627409915 * std::sqrt(55.0 / 6.0) / std::sqrt(10.0);
    CHECK(ci.mean == 5.5);
    CHECK(ci.half_width == doctest::Approx(half).epsilon(1e-9));
    CHECK(ci.lo == doctest::Approx(5.5 - half));
    CHECK(ci.std_dev == doctest::Approx(std::sqrt(55.0 / 6.0)));
    CHECK_THROWS(confidence_interval(std::vector<double>{1.0}, 0.95));
    CHECK_THROWS(confidence_interval(x, 1.0));
}

TEST_CASE("unit-variance noise gives the expected half-width and it shrinks like 1/sqrt(n)") {
    const FunctionOracle noise([](std::span<const double>, std::uint64_t seed) { return gaussian(seed); });
    const Vector theta{0};
    const ConfidenceInterval ci = terminal_ci(theta, noise, 400, 0.95, 11);
    // E[s] for n=400 is sqrt(2/399) Gamma(200)/Gamma(199.5), within 0.1% of 1.
    const double expected = t975(399) * std::exp(0.5 * std::log(2.0 / 399) + std::lgamma(200) - std::lgamma(199.5)) / 20.0;
    CHECK(expected == doctest::Approx(0.098).epsilon(0.01));
    CHECK(ci.half_width == doctest::Approx(expected).epsilon(0.2));

    double previous = 0.0;
    for (std::size_t n : {100, 400, 1600}) {
        const double h = terminal_ci(theta, noise, n, 0.95, 23).half_width;
        if (previous > 0.0) CHECK(previous / h == doctest::Approx(2.0).epsilon(0.2));
        previous = h;
    }
}

TEST_CASE("baselines share seeds and isolate failures") {
    const FunctionOracle oracle([](std::span<const double> t, std::uint64_t seed) {
        if (t[0] < 0) throw OracleError("negative plan");
        return t[0] + gaussian(seed);
    });
    const std::vector<NamedPoint> plans{{"three", {3}}, {"broken", {-1}}, {"one", {1}}, {"one_again", {1}}};
    const auto results = evaluate_baselines(plans, oracle, 300, 8);
    REQUIRE(results.size() == 4);
    CHECK(results[0].name == "one");
    CHECK(results[1].name == "one_again");
    CHECK(results[0].mean == results[1].mean);
    CHECK(results[2].name == "three");
    CHECK(results[2].mean - results[0].mean == doctest::Approx(2.0));
    CHECK(results[3].name == "broken");
    CHECK(results[3].failed);
    CHECK(results[3].error.find("negative plan") != std::string::npos);
    CHECK(results[0].std_error == doctest::Approx(1.0 / std::sqrt(300.0)).epsilon(0.15));

    const auto single = evaluate_baselines({{"null", {0}}}, oracle, 300, 8);
    CHECK(single[0].mean == doctest::Approx(terminal_ci(Vector{0}, oracle, 300, 0.95, 8).mean).epsilon(1e-14));
}

TEST_CASE("CRN probe detects shared noise") {
    const auto project = codec::box_projection(codec::BoxBounds({-5, -5}, {5, 5}));
    const FunctionOracle shared([](std::span<const double> t, std::uint64_t seed) {
        return 0.01 * (t[0] + t[1]) + gaussian(seed);
    });
    const CrnProbeResult yes = crn_probe(shared, Vector{0.2, 1.7}, project, 200, 5);
    CHECK(yes.correlation > 0.9);
    CHECK(yes.p_value < 0.05);
    REQUIRE(yes.recommend_crn.has_value());
    CHECK(*yes.recommend_crn);

    auto rng = std::make_shared<Engine>(make_engine(12));
    auto lock = std::make_shared<std::mutex>();
    const FunctionOracle independent(
        [rng, lock](std::span<const double> t, std::uint64_t) {
            std::lock_guard guard(*lock);
            return 0.01 * (t[0] + t[1]) + std::normal_distribution<double>(0, 1)(*rng);
        },
        false);
    const CrnProbeResult no = crn_probe(independent, Vector{0.2, 1.7}, project, 200, 5);
    CHECK(std::abs(no.correlation) < 0.2);
    REQUIRE(no.recommend_crn.has_value());
    CHECK_FALSE(*no.recommend_crn);

    const FunctionOracle flat([](std::span<const double>, std::uint64_t) { return 1.0; });
    const CrnProbeResult degenerate = crn_probe(flat, Vector{0, 0}, project, 50, 5);
    CHECK(degenerate.degenerate);
    CHECK_FALSE(degenerate.recommend_crn.has_value());

    CHECK_THROWS(crn_probe(shared, Vector{0, 0}, project, 5, 5));
}

TEST_CASE("CRN probe does not depend on which corner is called plus") {
    const auto project = codec::box_projection(codec::BoxBounds({-5}, {5}));
    // Reflecting the oracle about the midpoint swaps the two corners of every pair.
    const auto f = [](double x, std::uint64_t seed) { return x * x + 0.5 * gaussian(seed) * (1 + x); };
    const FunctionOracle a([&](std::span<const double> t, std::uint64_t s) { return f(t[0], s); });
    const FunctionOracle b([&](std::span<const double> t, std::uint64_t s) { return f(2 * 1.5 - t[0], s); });
    const CrnProbeResult ra = crn_probe(a, Vector{1.2}, project, 100, 3);
    const CrnProbeResult rb = crn_probe(b, Vector{1.2}, project, 100, 3);
    CHECK(ra.correlation == doctest::Approx(rb.correlation).epsilon(1e-12));
    CHECK(ra.recommend_crn == rb.recommend_crn);
}

TEST_CASE("herd immunity threshold") {
    CHECK(herd_threshold(1.3) == doctest::Approx(0.2308).epsilon(1e-4));
    CHECK(herd_threshold(1.0) == 0.0);
    CHECK(herd_threshold(2.0) == 0.5);
    CHECK_THROWS(herd_threshold(0.0));
}

TEST_CASE("a one-trial campaign averages to its own trace") {
    const FunctionOracle oracle = quadratic_with_noise(0.5);
    const CampaignResult r = run_campaign(small_campaign(1, 1), oracle);
    REQUIRE(r.completed() == 1);
    const auto& records = r.trials[0].trace.records;
    REQUIRE(r.mean_trace.size() == records.size());
    for (std::size_t k = 0; k < records.size(); ++k)
        CHECK(r.mean_trace[k] == 0.5 * (records[k].y_plus + records[k].y_minus));
}

TEST_CASE("campaigns are reproducible and thread-count independent") {
    const FunctionOracle oracle = quadratic_with_noise(0.5);
    const CampaignResult a = run_campaign(small_campaign(6, 1), oracle);
    const CampaignResult b = run_campaign(small_campaign(6, 4), oracle);
    CHECK(a.mean_trace == b.mean_trace);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a.trials[i].trace.solution == b.trials[i].trace.solution);
        CHECK(a.trials[i].base_seed == trial_seed(99, i));
        seeds.insert(a.trials[i].base_seed);
        for (auto v : a.trials[i].trace.solution) CHECK(std::abs(v - 2) <= 1);
    }
    CHECK(seeds.size() == 6);
    CHECK(trace_decrease(a.mean_trace, 20) > 0.9);

    const auto dir_a = std::filesystem::temp_directory_path() / "dspsa_campaign_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "dspsa_campaign_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    write_traces(dir_a, a);
    write_traces(dir_b, b);
    CHECK(slurp(dir_a / "trace_mean.csv") == slurp(dir_b / "trace_mean.csv"));
    CHECK(slurp(dir_a / "trace_trial_005.csv") == slurp(dir_b / "trace_trial_005.csv"));
    CHECK(slurp(dir_a / "trace_mean.csv").rfind("k,mean_loss\n", 0) == 0);
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("a failing trial is reported without stopping the others") {
    const FunctionOracle oracle([](std::span<const double> t, std::uint64_t seed) {
        if (seed % 4 == 0 && t[0] >= 10) throw OracleError("unlucky");
        double s = 0.0;
        for (double v : t) s += (v - 2.3) * (v - 2.3);
        return s;
    });
    CampaignConfig c = small_campaign(8, 2);
    c.run_config.theta0 = {9, 0, 0};
    const CampaignResult r = run_campaign(c, oracle);
    REQUIRE(r.trials.size() == 8);
    std::size_t failed = 0;
    for (const auto& t : r.trials) {
        if (t.failed) {
            ++failed;
            CHECK(t.error.find("unlucky") != std::string::npos);
        }
    }
    CHECK(failed > 0);
    CHECK(r.completed() > 0);
    CHECK(failed + r.completed() == 8);
    CHECK(r.mean_trace.size() == 300);
}

TEST_CASE("campaign configuration is validated") {
    CampaignConfig c = small_campaign(0, 1);
    CHECK_THROWS(c.validate());
    c = small_campaign(1, 0);
    CHECK_THROWS(c.validate());
}

TEST_CASE("trace decrease") {
    const std::vector<double> t{10, 10, 8, 6, 4, 2, 2};
    CHECK(trace_decrease(t, 2) == doctest::Approx(0.8));
    CHECK_THROWS(trace_decrease(t, 0));
    CHECK(trace_decrease(t, 100) == 0.0);
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 7, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
}
