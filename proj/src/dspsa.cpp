#include "dspsa/dspsa.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dspsa/format.hpp"

namespace dspsa {

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

GainSchedule::GainSchedule(double a, double A, double alpha) : a_(a), A_(A), alpha_(alpha) {
    if (!(a > 0.0)) throw std::invalid_argument("gain schedule: a must be > 0");
    if (!(A >= 0.0)) throw std::invalid_argument("gain schedule: A must be >= 0");
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw std::invalid_argument("gain schedule: alpha must lie in (0.5, 1]");
}

double GainSchedule::at(std::uint64_t k) const noexcept {
    return a_ / std::pow(1.0 + A_ + static_cast<double>(k), alpha_);
}

Projection identity_projection() {
    return [](std::span<const double> t) {
        return ProjectedPoint{Vector(t.begin(), t.end()), std::vector<bool>(t.size(), false)};
    };
}

Vector midpoint(std::span<const double> theta_hat, const Projection& project) {
    ProjectedPoint projected = project(theta_hat);
    Vector mid(projected.values.size());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = std::floor(projected.values[i]) + 0.5;
    return mid;
}

std::pair<std::uint64_t, std::uint64_t> pair_seeds(bool crn, std::uint64_t k,
                                                   std::uint64_t base_seed) noexcept {
    if (crn) {
        const std::uint64_t s = mix(base_seed, k);
        return {s, s};
    }
    return {mix(base_seed, 2 * k), mix(base_seed, 2 * k + 1)};
}

namespace {

// Evaluates both corners. On failure, *failed points at the corner that threw.
EvaluatedPair eval_pair_tracked(std::span<const double> mid, const PerturbationDraw& delta,
                                const NoisyLossOracle& oracle, bool crn, std::uint64_t k,
                                std::uint64_t base_seed, Vector* failed) {
    if (mid.size() != delta.size())
        throw std::invalid_argument("eval_pair: midpoint and perturbation dimensions differ");
    EvaluatedPair out;
    out.theta_plus.resize(mid.size());
    out.theta_minus.resize(mid.size());
    for (std::size_t i = 0; i < mid.size(); ++i) {
        const double half = 0.5 * delta.delta[i];
        out.theta_plus[i] = mid[i] + half;
        out.theta_minus[i] = mid[i] - half;
    }
    std::tie(out.seed_plus, out.seed_minus) = pair_seeds(crn, k, base_seed);
    const Vector* current = &out.theta_plus;
    try {
        out.y_plus = oracle.evaluate(out.theta_plus, out.seed_plus);
        current = &out.theta_minus;
        out.y_minus = oracle.evaluate(out.theta_minus, out.seed_minus);
    } catch (const OracleError&) {
        if (failed) *failed = *current;
        throw;
    }
    return out;
}

} // namespace

EvaluatedPair eval_pair(std::span<const double> mid, const PerturbationDraw& delta,
                        const NoisyLossOracle& oracle, bool crn, std::uint64_t k,
                        std::uint64_t base_seed) {
    return eval_pair_tracked(mid, delta, oracle, crn, k, base_seed, nullptr);
}

Vector gradient_estimate(double y_plus, double y_minus, const PerturbationDraw& delta) {
    const double diff = y_plus - y_minus;
    Vector g(delta.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = diff / static_cast<double>(delta.delta[i]);
    return g;
}

Vector update(std::span<const double> theta_hat, double a_k, std::span<const double> g_hat) {
    if (theta_hat.size() != g_hat.size())
        throw std::invalid_argument("update: iterate and gradient dimensions differ");
    Vector next(theta_hat.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = theta_hat[i] - a_k * g_hat[i];
    return next;
}

IntVector finalize(std::span<const double> theta_hat, const Projection& project) {
    ProjectedPoint projected = project(theta_hat);
    IntVector out(projected.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = projected.values[i];
        const bool clipped = i < projected.upper_clipped.size() && projected.upper_clipped[i];
        const double r = clipped ? std::ceil(v - 0.5) : std::round(v);
        out[i] = static_cast<std::int64_t>(r);
    }
    return out;
}

void RunConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("run config: iterations (M) must be >= 1");
    if (theta0.empty()) throw std::invalid_argument("run config: theta0 must have dimension >= 1");
    for (std::size_t i = 0; i < theta0.size(); ++i) {
        if (!std::isfinite(theta0[i]) || theta0[i] != std::floor(theta0[i])) {
            std::ostringstream msg;
            msg << "run config: theta0[" << i << "] = " << theta0[i] << " is not an integer";
            throw std::invalid_argument(msg.str());
        }
    }
}

namespace {

std::string describe(std::uint64_t k, const Vector& point, const std::string& cause) {
    std::ostringstream msg;
    msg << "oracle failed at iteration " << k << ", point (";
    for (std::size_t i = 0; i < point.size(); ++i) msg << (i ? "," : "") << point[i];
    msg << "): " << cause;
    return msg.str();
}

} // namespace

RunAborted::RunAborted(std::uint64_t k, Vector point, const std::string& cause)
    : std::runtime_error(describe(k, point, cause)), k_(k), point_(std::move(point)) {}

RunTrace run(const RunConfig& config, const NoisyLossOracle& oracle, const Projection& project,
             const RunOptions& options) {
    config.validate();
    const std::size_t p = config.theta0.size();
    Engine perturbations = make_engine(mix(config.base_seed ^ kPerturbationSalt, 0));

    RunTrace trace;
    if (options.keep_records) trace.records.reserve(config.iterations);
    Vector theta = config.theta0;

    for (std::uint64_t k = 0; k < config.iterations; ++k) {
        IterationRecord rec;
        rec.k = k;
        rec.theta_hat = theta;
        rec.midpoint = midpoint(theta, project);
        if (rec.midpoint.size() != p)
            throw std::logic_error("run: projection changed the dimension of the iterate");
        rec.delta = draw_perturbation(p, perturbations);

        EvaluatedPair pair;
        Vector failed;
        try {
            pair = eval_pair_tracked(rec.midpoint, rec.delta, oracle, config.crn, k, config.base_seed,
                                     &failed);
        } catch (const OracleError& e) {
            throw RunAborted(k, std::move(failed), e.what());
        }
        rec.y_plus = pair.y_plus;
        rec.y_minus = pair.y_minus;
        rec.g_hat = gradient_estimate(rec.y_plus, rec.y_minus, rec.delta);
        rec.a_k = config.gains.at(k);

        theta = update(theta, rec.a_k, rec.g_hat);
        if (options.repair) options.repair(theta);

        if (options.observer) options.observer(rec);
        if (options.keep_records) trace.records.push_back(std::move(rec));
    }

    trace.final_iterate = theta;
    trace.solution = finalize(theta, project);
    return trace;
}

double tune_initial_gain(const NoisyLossOracle& oracle, std::span<const double> theta0,
                         const Projection& project, double desired_step, std::size_t n_samples,
                         std::uint64_t base_seed, bool crn) {
    if (n_samples < 1) throw std::invalid_argument("tune_initial_gain: n_samples must be >= 1");
    if (!(desired_step > 0.0)) throw std::invalid_argument("tune_initial_gain: desired_step must be > 0");
    const Vector mid = midpoint(theta0, project);
    Engine perturbations = make_engine(mix(base_seed ^ kPerturbationSalt, 0));

    double total = 0.0;
    for (std::size_t j = 0; j < n_samples; ++j) {
        PerturbationDraw delta = draw_perturbation(mid.size(), perturbations);
        EvaluatedPair pair = eval_pair(mid, delta, oracle, crn, j, base_seed);
        Vector g = gradient_estimate(pair.y_plus, pair.y_minus, delta);
        double mag = 0.0;
        for (double gi : g) mag += std::abs(gi);
        total += mag / static_cast<double>(g.size());
    }
    const double average = total / static_cast<double>(n_samples);
    if (!(average > 0.0))
        throw std::domain_error("tune_initial_gain: average gradient magnitude is zero at theta0");
    return desired_step / average;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
    const std::size_t p = records.empty() ? 0 : records.front().theta_hat.size();
    out << "k,a_k,y_plus,y_minus";
    for (std::size_t i = 0; i < p; ++i) out << ",theta_" << (i + 1);
    for (std::size_t i = 0; i < p; ++i) out << ",g_" << (i + 1);
    out << '\n';
    for (const IterationRecord& r : records) {
        out << r.k << ',' << format_number(r.a_k) << ',' << format_number(r.y_plus) << ','
            << format_number(r.y_minus);
        for (double v : r.theta_hat) out << ',' << format_number(v);
        for (double v : r.g_hat) out << ',' << format_number(v);
        out << '\n';
    }
}

} // namespace dspsa
