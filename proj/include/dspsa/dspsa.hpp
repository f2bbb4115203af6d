#pragma once

// Constrained discrete simultaneous perturbation stochastic approximation.
//
// The recursion works on a real-valued iterate theta_hat. Each iteration
// projects it into the box, snaps it to the centre of the unit hypercube that
// contains it, evaluates the noisy loss at two opposite integer corners of that
// hypercube and steps against the resulting subgradient estimate. The answer
// is the rounded projection of the last iterate.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dspsa/seeding.hpp"

namespace dspsa {

using Vector = std::vector<double>;
using IntVector = std::vector<std::int64_t>;

/// a_k = a / (1 + A + k)^alpha with a > 0, A >= 0 and 0.5 < alpha <= 1.
class GainSchedule {
public:
    GainSchedule(double a, double A, double alpha);

    double a() const noexcept { return a_; }
    double A() const noexcept { return A_; }
    double alpha() const noexcept { return alpha_; }

    double at(std::uint64_t k) const noexcept;

private:
    double a_;
    double A_;
    double alpha_;
};

inline double gain_at(const GainSchedule& gains, std::uint64_t k) noexcept { return gains.at(k); }

/// Vector of independent +/-1 signs. Each sign is its own inverse.
struct PerturbationDraw {
    std::vector<int> delta;

    std::size_t size() const noexcept { return delta.size(); }
};

/// Draws p symmetric Bernoulli signs. One 64-bit word from the generator
/// supplies up to 64 signs (bit set -> +1), so the result depends only on the
/// generator's raw output and is identical across standard libraries.
template <std::uniform_random_bit_generator G>
PerturbationDraw draw_perturbation(std::size_t p, G& gen) {
    static_assert(G::min() == 0 && G::max() == std::numeric_limits<std::uint64_t>::max(),
                  "draw_perturbation needs a full 64-bit generator");
    if (p == 0) throw std::invalid_argument("draw_perturbation: dimension must be >= 1");
    PerturbationDraw draw;
    draw.delta.resize(p);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < p; ++i) {
        if (i % 64 == 0) bits = static_cast<std::uint64_t>(gen());
        draw.delta[i] = (bits & 1U) ? 1 : -1;
        bits >>= 1;
    }
    return draw;
}

/// Result of projecting a point into the feasible region. upper_clipped marks
/// coordinates that were pulled down from at or above their upper bound; the
/// final rounding treats those differently.
struct ProjectedPoint {
    Vector values;
    std::vector<bool> upper_clipped;
};

using Projection = std::function<ProjectedPoint(std::span<const double>)>;

/// Optional in-place repair applied to every new iterate (e.g. window ordering).
using Repair = std::function<void(Vector&)>;

Projection identity_projection();

/// Raised by an oracle that cannot evaluate a point (e.g. an infeasible plan).
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// y(theta) = L(theta) + noise. evaluate must be a deterministic function of
/// (theta, seed).
class NoisyLossOracle {
public:
    virtual ~NoisyLossOracle() = default;
    virtual double evaluate(std::span<const double> theta, std::uint64_t seed) const = 0;
    /// False if two evaluate calls must not overlap in time.
    virtual bool concurrent_safe() const noexcept { return true; }
};

class FunctionOracle final : public NoisyLossOracle {
public:
    using Fn = std::function<double(std::span<const double>, std::uint64_t)>;

    explicit FunctionOracle(Fn fn, bool concurrent_safe = true)
        : fn_(std::move(fn)), concurrent_safe_(concurrent_safe) {}

    double evaluate(std::span<const double> theta, std::uint64_t seed) const override {
        return fn_(theta, seed);
    }
    bool concurrent_safe() const noexcept override { return concurrent_safe_; }

private:
    Fn fn_;
    bool concurrent_safe_;
};

/// floor(project(theta_hat)) + 1/2 in every coordinate.
Vector midpoint(std::span<const double> theta_hat, const Projection& project);

struct EvaluatedPair {
    Vector theta_plus;
    Vector theta_minus;
    double y_plus = 0.0;
    double y_minus = 0.0;
    std::uint64_t seed_plus = 0;
    std::uint64_t seed_minus = 0;
};

/// Oracle seeds for iteration k. With common random numbers both sides share
/// mix(base_seed, k); otherwise they get mix(base_seed, 2k) and mix(base_seed, 2k+1).
std::pair<std::uint64_t, std::uint64_t> pair_seeds(bool crn, std::uint64_t k,
                                                   std::uint64_t base_seed) noexcept;

/// Evaluates the oracle at mid +/- delta/2. Oracle failures propagate unchanged;
/// run() wraps them with the iteration context.
EvaluatedPair eval_pair(std::span<const double> mid, const PerturbationDraw& delta,
                        const NoisyLossOracle& oracle, bool crn, std::uint64_t k,
                        std::uint64_t base_seed);

/// (y_plus - y_minus) * delta^-1, componentwise.
Vector gradient_estimate(double y_plus, double y_minus, const PerturbationDraw& delta);

/// theta_hat - a_k * g. No projection.
Vector update(std::span<const double> theta_hat, double a_k, std::span<const double> g_hat);

/// Rounds project(theta_hat) to the integer lattice. Coordinates clipped at the
/// upper bound round half down so they stay strictly below u when tau = 0.5;
/// every other coordinate rounds half away from zero.
IntVector finalize(std::span<const double> theta_hat, const Projection& project);

struct IterationRecord {
    std::uint64_t k = 0;
    Vector theta_hat;
    Vector midpoint;
    PerturbationDraw delta;
    double y_plus = 0.0;
    double y_minus = 0.0;
    Vector g_hat;
    double a_k = 0.0;
};

struct RunConfig {
    std::uint64_t iterations = 1;  // M
    Vector theta0;
    GainSchedule gains{1.0, 0.0, 1.0};
    bool crn = false;
    std::uint64_t base_seed = 0;

    /// Throws std::invalid_argument when M < 1, theta0 is empty or not integral.
    void validate() const;
};

struct RunTrace {
    std::vector<IterationRecord> records;
    Vector final_iterate;  // theta_hat_M
    IntVector solution;    // finalize(theta_hat_M)
};

/// Oracle failure inside run(), tagged with where it happened.
class RunAborted : public std::runtime_error {
public:
    RunAborted(std::uint64_t k, Vector point, const std::string& cause);

    std::uint64_t iteration() const noexcept { return k_; }
    const Vector& point() const noexcept { return point_; }

private:
    std::uint64_t k_;
    Vector point_;
};

/// Called after each iteration; lets callers stream progress without
/// keeping the whole trace.
using IterationObserver = std::function<void(const IterationRecord&)>;

struct RunOptions {
    Repair repair;
    IterationObserver observer;
    bool keep_records = true;
};

/// Runs exactly config.iterations iterations of the recursion.
RunTrace run(const RunConfig& config, const NoisyLossOracle& oracle, const Projection& project,
             const RunOptions& options = {});

/// Returns desired_step divided by the average |g_hat_0| component magnitude over
/// n_samples independent (delta, seed) draws at theta0. Throws std::domain_error
/// when the loss looks flat at theta0.
double tune_initial_gain(const NoisyLossOracle& oracle, std::span<const double> theta0,
                         const Projection& project, double desired_step, std::size_t n_samples,
                         std::uint64_t base_seed, bool crn = false);

/// CSV: k,a_k,y_plus,y_minus,theta_1..theta_p,g_1..g_p
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& records);

} // namespace dspsa
