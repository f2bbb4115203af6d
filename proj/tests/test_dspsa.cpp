#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dspsa/codec.hpp"
#include "dspsa/dspsa.hpp"

using namespace dspsa;

namespace {

double reference_gain(double a, double A, double alpha, std::uint64_t k) {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 base = cpp_bin_float_50(1) + cpp_bin_float_50(A) + cpp_bin_float_50(k);
    return static_cast<double>(cpp_bin_float_50(a) / boost::multiprecision::pow(base, cpp_bin_float_50(alpha)));
}

struct AllOnes {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return max(); }
};

Projection box(double l, double u, std::size_t p, double tau = 0.5) {
    return codec::box_projection(codec::BoxBounds(Vector(p, l), Vector(p, u), tau));
}

} // namespace

TEST_CASE("gain_at matches the closed form") {
    CHECK(gain_at(GainSchedule(1.5, 0, 1), 0) == 1.5);

    const double h1n1 = gain_at(GainSchedule(1.5, 1000, 0.501), 0);
    CHECK(std::abs(h1n1 - reference_gain(1.5, 1000, 0.501, 0)) <= 1e-12 * h1n1);
    CHECK(h1n1 == doctest::Approx(0.04707).epsilon(1e-3));

    const double covid = gain_at(GainSchedule(0.08, 500, 0.501), 0);
    CHECK(std::abs(covid - reference_gain(0.08, 500, 0.501, 0)) <= 1e-12 * covid);
    CHECK(covid == doctest::Approx(0.003545).epsilon(1e-3));

    for (std::uint64_t k : {1ULL, 17ULL, 9999ULL, 1000000ULL}) {
        const double v = gain_at(GainSchedule(0.3, 42, 0.602), k);
        CHECK(std::abs(v - reference_gain(0.3, 42, 0.602, k)) <= 1e-12 * v);
    }
}

TEST_CASE("gain schedule rejects invalid coefficients") {
    CHECK_THROWS_AS(GainSchedule(0.0, 1, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(GainSchedule(1.0, -1, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(GainSchedule(1.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GainSchedule(1.0, 1, 1.01), std::invalid_argument);
    CHECK_NOTHROW(GainSchedule(1.0, 0, 1.0));
}

TEST_CASE("gain sequence decreases, sum diverges, sum of squares converges") {
    for (double alpha : {0.501, 0.602, 1.0}) {
        const GainSchedule g(1.0, 10, alpha);
        // Block sums over [N, 2N): for a_k ~ k^-alpha they scale by 2^(1-alpha) per
        // doubling, for a_k^2 by 2^(1-2 alpha).
        double previous_block = 0.0, previous_square_block = 0.0;
        double previous = g.at(0);
        std::uint64_t k = 1;
        for (std::uint64_t n = 1024; n <= (1ULL << 20); n *= 2) {
            double block = 0.0, square_block = 0.0;
            for (; k < 2 * n; ++k) {
                const double a = g.at(k);
                REQUIRE(a < previous);
                previous = a;
                if (k >= n) {
                    block += a;
                    square_block += a * a;
                }
            }
            if (previous_block > 0.0) {
                CHECK(block / previous_block == doctest::Approx(std::pow(2.0, 1.0 - alpha)).epsilon(0.01));
                CHECK(square_block / previous_square_block ==
                      doctest::Approx(std::pow(2.0, 1.0 - 2.0 * alpha)).epsilon(0.01));
                if (alpha > 0.6) CHECK(square_block < previous_square_block);
                CHECK(block >= previous_block * 0.999);
            }
            previous_block = block;
            previous_square_block = square_block;
        }
    }
}

TEST_CASE("perturbations are symmetric signs") {
    AllOnes heads;
    CHECK(draw_perturbation(1, heads).delta == std::vector<int>{1});
    CHECK_THROWS_AS(draw_perturbation(0, heads), std::invalid_argument);

    Engine a = make_engine(7), b = make_engine(7);
    CHECK(draw_perturbation(4, a).delta == draw_perturbation(4, b).delta);

    Engine rng = make_engine(12345);
    std::vector<double> sum(8, 0.0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto d = draw_perturbation(8, rng);
        for (std::size_t j = 0; j < 8; ++j) {
            REQUIRE((d.delta[j] == 1 || d.delta[j] == -1));
            sum[j] += d.delta[j];
        }
    }
    for (double s : sum) CHECK(std::abs(s / n) <= 0.03);

    Engine wide = make_engine(3);
    CHECK(draw_perturbation(130, wide).size() == 130);
}

TEST_CASE("midpoint is the centre of the enclosing unit hypercube") {
    CHECK(midpoint(Vector{2.3, -1.7}, identity_projection()) == Vector{2.5, -1.5});
    CHECK(midpoint(Vector{12.0}, box(0, 10, 1)) == Vector{9.5});
    CHECK(midpoint(Vector{3.0, 3.0}, box(0, 10, 2)) == Vector{3.5, 3.5});
    CHECK(midpoint(Vector{-4.0}, box(0, 10, 1)) == Vector{0.5});
}

TEST_CASE("eval_pair evaluates the two opposite corners") {
    std::vector<std::pair<Vector, std::uint64_t>> calls;
    FunctionOracle oracle([&](std::span<const double> t, std::uint64_t seed) {
        calls.emplace_back(Vector(t.begin(), t.end()), seed);
        return t[0];
    });

    auto pair = eval_pair(Vector{2.5}, PerturbationDraw{{1}}, oracle, false, 0, 1);
    CHECK(pair.theta_plus == Vector{3});
    CHECK(pair.theta_minus == Vector{2});
    CHECK(pair.y_plus == 3.0);
    CHECK(pair.y_minus == 2.0);

    pair = eval_pair(Vector{2.5, -1.5}, PerturbationDraw{{1, -1}}, oracle, false, 0, 1);
    CHECK(pair.theta_plus == Vector{3, -2});
    CHECK(pair.theta_minus == Vector{2, -1});

    calls.clear();
    eval_pair(Vector{0.5}, PerturbationDraw{{1}}, oracle, true, 9, 77);
    REQUIRE(calls.size() == 2);
    CHECK(calls[0].second == mix(77, 9));
    CHECK(calls[1].second == mix(77, 9));

    calls.clear();
    eval_pair(Vector{0.5}, PerturbationDraw{{1}}, oracle, false, 9, 77);
    REQUIRE(calls.size() == 2);
    CHECK(calls[0].second == mix(77, 18));
    CHECK(calls[1].second == mix(77, 19));
}

TEST_CASE("eval_pair with common random numbers is repeatable") {
    FunctionOracle noisy([](std::span<const double> t, std::uint64_t seed) {
        return t[0] + static_cast<double>(seed % 1000) / 1000.0;
    });
    const auto a = eval_pair(Vector{1.5, 0.5}, PerturbationDraw{{-1, 1}}, noisy, true, 4, 5);
    const auto b = eval_pair(Vector{1.5, 0.5}, PerturbationDraw{{-1, 1}}, noisy, true, 4, 5);
    CHECK(a.y_plus == b.y_plus);
    CHECK(a.y_minus == b.y_minus);
}

TEST_CASE("gradient estimate") {
    CHECK(gradient_estimate(10, 6, PerturbationDraw{{1, -1}}) == Vector{4, -4});
    CHECK(gradient_estimate(2.5, 2.5, PerturbationDraw{{1, -1, 1}}) == Vector{0, 0, 0});
    CHECK(gradient_estimate(3.5, 5.0, PerturbationDraw{{-1, -1, 1}}) == Vector{1.5, 1.5, -1.5});
}

TEST_CASE("update steps against the gradient without projecting") {
    CHECK(update(Vector{2, 0}, 0.5, Vector{4, -4}) == Vector{0, 2});
    CHECK(update(Vector{1.25, -3}, 0.7, Vector{0, 0}) == Vector{1.25, -3});
    CHECK(update(Vector{1.2}, 0.047, Vector{-10})[0] == doctest::Approx(1.67));
    CHECK(update(Vector{0}, 1.0, Vector{50})[0] == -50.0);
}

TEST_CASE("finalize rounds the projected iterate") {
    const auto p = box(0, 10, 2);
    CHECK(finalize(Vector{2.4, 7.6}, p) == IntVector{2, 8});
    CHECK(finalize(Vector{-3.0}, box(0, 10, 1)) == IntVector{0});
    CHECK(finalize(Vector{10.9}, box(0, 10, 1)) == IntVector{9});
    CHECK(finalize(Vector{2.5, -2.5}, identity_projection()) == IntVector{3, -3});
    CHECK(finalize(Vector{9.5}, box(0, 10, 1)) == IntVector{10});
}

TEST_CASE("run with a flat oracle leaves the iterate unchanged") {
    FunctionOracle zero([](std::span<const double>, std::uint64_t) { return 0.0; });
    RunConfig cfg;
    cfg.iterations = 1;
    cfg.theta0 = {3, -2};
    const auto trace = run(cfg, zero, identity_projection());
    CHECK(trace.final_iterate == Vector{3, -2});
    CHECK(trace.solution == IntVector{3, -2});
    CHECK(trace.records.size() == 1);
}

TEST_CASE("run minimizes a separable quadratic") {
    FunctionOracle quadratic([](std::span<const double> t, std::uint64_t) {
        return std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
    });
    RunConfig cfg;
    cfg.iterations = 2000;
    cfg.theta0 = {4, 4};
    cfg.gains = GainSchedule(0.1, 100, 0.602);
    cfg.base_seed = 3;
    const auto trace = run(cfg, quadratic, box(-10, 10, 2));
    CHECK(trace.solution == IntVector{0, 0});
    CHECK(trace.records.size() == 2000);

    for (const auto& r : trace.records) {
        for (std::size_t i = 0; i < 2; ++i) {
            const double plus = r.midpoint[i] + 0.5 * r.delta.delta[i];
            const double minus = r.midpoint[i] - 0.5 * r.delta.delta[i];
            REQUIRE(plus == std::round(plus));
            REQUIRE(std::abs(plus - minus) == 1.0);
            REQUIRE(std::abs(r.g_hat[i]) == std::abs(r.y_plus - r.y_minus));
        }
    }
}

TEST_CASE("run is reproducible for a fixed seed") {
    FunctionOracle noisy([](std::span<const double> t, std::uint64_t seed) {
        Engine e = make_engine(seed);
        return (t[0] - 2) * (t[0] - 2) + (t[1] + 1) * (t[1] + 1) + std::normal_distribution<double>(0, 2)(e);
    });
    RunConfig cfg;
    cfg.iterations = 300;
    cfg.theta0 = {0, 0};
    cfg.gains = GainSchedule(0.05, 30, 0.602);
    cfg.crn = true;
    cfg.base_seed = 99;
    const auto a = run(cfg, noisy, box(-10, 10, 2));
    const auto b = run(cfg, noisy, box(-10, 10, 2));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].theta_hat == b.records[k].theta_hat);
        CHECK(a.records[k].y_plus == b.records[k].y_plus);
        CHECK(a.records[k].y_minus == b.records[k].y_minus);
    }
    CHECK(a.solution == b.solution);
}

TEST_CASE("averaging the estimate over every perturbation gives the symmetric difference") {
    const Vector target{1.0, -2.0, 0.5, 3.0, -4.0, 2.0};
    const auto loss = [&](std::span<const double> t) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) s += (t[i] - target[i]) * (t[i] - target[i]);
        return s;
    };
    FunctionOracle oracle([&](std::span<const double> t, std::uint64_t) { return loss(t); });
    const std::size_t p = target.size();
    const Vector mid = midpoint(Vector{3.2, 0.1, -1.0, 2.9, 5.5, -6.0}, identity_projection());

    Vector mean(p, 0.0);
    for (std::uint32_t mask = 0; mask < (1U << p); ++mask) {
        PerturbationDraw d;
        for (std::size_t i = 0; i < p; ++i) d.delta.push_back((mask >> i) & 1U ? 1 : -1);
        const auto pair = eval_pair(mid, d, oracle, true, 0, 0);
        const Vector g = gradient_estimate(pair.y_plus, pair.y_minus, d);
        for (std::size_t i = 0; i < p; ++i) mean[i] += g[i] / static_cast<double>(1U << p);
    }
    for (std::size_t i = 0; i < p; ++i) {
        Vector up = mid, down = mid;
        up[i] += 0.5;
        down[i] -= 0.5;
        CHECK(mean[i] == doctest::Approx(loss(up) - loss(down)));
    }
}

TEST_CASE("finalize stays inside the box for every iterate") {
    Engine rng = make_engine(8);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    const auto p = box(-3, 7, 1);
    for (int i = 0; i < 5000; ++i) {
        const double t = u(rng);
        const auto s = finalize(Vector{t}, p);
        CHECK(s[0] >= -3);
        if (t >= 7.0)
            CHECK(s[0] <= 6);
        else
            CHECK(s[0] <= 7);
    }
}

TEST_CASE("repair runs on every new iterate") {
    FunctionOracle linear([](std::span<const double> t, std::uint64_t) { return t[0] - t[1]; });
    RunConfig cfg;
    cfg.iterations = 50;
    cfg.theta0 = {0, 0};
    cfg.gains = GainSchedule(0.5, 0, 0.602);
    int calls = 0;
    RunOptions opts;
    opts.repair = [&](Vector& t) {
        ++calls;
        t[1] = std::min(t[1], 3.0);
    };
    const auto trace = run(cfg, linear, identity_projection(), opts);
    CHECK(calls == 50);
    CHECK(trace.final_iterate[1] <= 3.0);
}

TEST_CASE("oracle failures abort the run with context") {
    FunctionOracle picky([](std::span<const double> t, std::uint64_t) -> double {
        if (t[0] >= 3) throw OracleError("plan out of domain");
        return -t[0];
    });
    RunConfig cfg;
    cfg.iterations = 100;
    cfg.theta0 = {0};
    cfg.gains = GainSchedule(1.0, 0, 0.602);
    try {
        run(cfg, picky, identity_projection());
        FAIL("expected RunAborted");
    } catch (const RunAborted& e) {
        CHECK(e.point().size() == 1);
        CHECK(e.point()[0] >= 3);
        CHECK(std::string(e.what()).find("plan out of domain") != std::string::npos);
    }
}

TEST_CASE("run config validation") {
    FunctionOracle zero([](std::span<const double>, std::uint64_t) { return 0.0; });
    RunConfig cfg;
    cfg.theta0 = {0.5};
    CHECK_THROWS_AS(run(cfg, zero, identity_projection()), std::invalid_argument);
    cfg.theta0 = {};
    CHECK_THROWS_AS(run(cfg, zero, identity_projection()), std::invalid_argument);
    cfg.theta0 = {1};
    cfg.iterations = 0;
    CHECK_THROWS_AS(run(cfg, zero, identity_projection()), std::invalid_argument);
}

TEST_CASE("tune_initial_gain") {
    FunctionOracle constant([](std::span<const double>, std::uint64_t) { return 4.0; });
    CHECK_THROWS_AS(tune_initial_gain(constant, Vector{1, 1}, identity_projection(), 0.5, 20, 1), std::domain_error);

    FunctionOracle sum([](std::span<const double> t, std::uint64_t) { return std::accumulate(t.begin(), t.end(), 0.0); });
    CHECK(tune_initial_gain(sum, Vector{3}, identity_projection(), 0.5, 10, 1) == doctest::Approx(0.5));
    // p = 2: |y+ - y-| is 2 when the signs agree and 0 otherwise.
    const double a = tune_initial_gain(sum, Vector{0, 0}, identity_projection(), 1.0, 4000, 2);
    CHECK(a == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("trace csv layout") {
    FunctionOracle quadratic([](std::span<const double> t, std::uint64_t) { return t[0] * t[0] + t[1] * t[1]; });
    RunConfig cfg;
    cfg.iterations = 3;
    cfg.theta0 = {1, 2};
    cfg.gains = GainSchedule(0.25, 0, 1.0);
    const auto trace = run(cfg, quadratic, identity_projection());
    std::ostringstream csv;
    write_trace_csv(csv, trace.records);
    std::istringstream lines(csv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "k,a_k,y_plus,y_minus,theta_1,theta_2,g_1,g_2");
    CHECK(first.rfind("0,0.25,", 0) == 0);
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 2);
}
