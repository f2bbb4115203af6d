#include "dspsa/codec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dspsa::codec {

namespace {

[[noreturn]] void fail(const std::string& what) { throw CodecError(what); }

std::int64_t slot_in(std::span<const std::int64_t> theta, std::size_t i, std::int64_t lo,
                     std::int64_t hi, const char* name) {
    const std::int64_t v = theta[i];
    if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << "slot " << i << " (" << name << ") = " << v << " outside [" << lo << ", " << hi << "]";
        fail(msg.str());
    }
    return v;
}

constexpr std::array<const char*, kAgeGroups> kPriorityNames{
    "priority_preschool", "priority_school_age", "priority_young_adults", "priority_older_adults",
    "priority_elderly"};

constexpr std::array<const char*, kCovidPolicies> kPolicyNames{"distancing", "school_closure",
                                                               "testing", "tracing"};

int grid_index(double value, double step, const char* what) {
    const double scaled = value / step;
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-9) {
        std::ostringstream msg;
        msg << what << " = " << value << " is not a multiple of " << step;
        fail(msg.str());
    }
    return static_cast<int>(nearest);
}

} // namespace

BoxBounds::BoxBounds(Vector lo, Vector hi, double t) : lower(std::move(lo)), upper(std::move(hi)), tau(t) {
    validate();
}

void BoxBounds::validate() const {
    if (lower.size() != upper.size()) fail("box bounds: lower and upper have different lengths");
    if (lower.empty()) fail("box bounds: empty");
    if (!(tau > 0.0 && tau < 1.0)) fail("box bounds: tau must lie in (0, 1)");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i])) {
            std::ostringstream msg;
            msg << "box bounds: coordinate " << i << " has lower " << lower[i] << " >= upper " << upper[i];
            fail(msg.str());
        }
    }
}

Vector project_box(std::span<const double> t, const BoxBounds& bounds) {
    if (t.size() != bounds.size()) fail("project_box: dimension mismatch");
    Vector out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < bounds.lower[i])
            out[i] = bounds.lower[i];
        else if (t[i] < bounds.upper[i])
            out[i] = t[i];
        else
            out[i] = bounds.upper[i] - bounds.tau;
    }
    return out;
}

Projection box_projection(BoxBounds bounds) {
    bounds.validate();
    return [bounds = std::move(bounds)](std::span<const double> t) {
        ProjectedPoint p;
        p.values = project_box(t, bounds);
        p.upper_clipped.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) p.upper_clipped[i] = t[i] >= bounds.upper[i];
        return p;
    };
}

std::string_view to_string(AntiviralPolicy policy) {
    switch (policy) {
    case AntiviralPolicy::None: return "none";
    case AntiviralPolicy::TreatmentOnly: return "treatment_only";
    case AntiviralPolicy::HHTAP100: return "hhtap100";
    case AntiviralPolicy::HHTAP: return "hhtap";
    }
    return "unknown";
}

AntiviralPolicy antiviral_from_string(std::string_view name) {
    for (int i = 0; i <= 3; ++i) {
        const auto policy = static_cast<AntiviralPolicy>(i);
        if (to_string(policy) == name) return policy;
    }
    fail("unknown antiviral policy '" + std::string(name) + "'");
}

BoxBounds h1n1_bounds(int max_closure_weeks, double tau) {
    if (max_closure_weeks < 1) fail("h1n1 bounds: max closure weeks must be >= 1");
    Vector lo(kH1N1Dim, 0.0);
    Vector hi{10, 3, 3, 3, 3, 3, 3, static_cast<double>(max_closure_weeks)};
    return BoxBounds(std::move(lo), std::move(hi), tau);
}

H1N1Plan decode_h1n1(std::span<const std::int64_t> theta, int max_closure_weeks) {
    if (theta.size() != kH1N1Dim) fail("decode_h1n1: expected 8 slots");
    H1N1Plan plan;
    plan.vaccination_fraction = static_cast<double>(slot_in(theta, 0, 0, 10, "vaccination_fraction")) / 10.0;
    for (std::size_t g = 0; g < kAgeGroups; ++g)
        plan.priorities[g] = static_cast<int>(slot_in(theta, 1 + g, 0, 3, kPriorityNames[g]));
    plan.antiviral = static_cast<AntiviralPolicy>(slot_in(theta, 6, 0, 3, "antiviral_policy"));
    plan.school_closure_weeks = static_cast<int>(slot_in(theta, 7, 0, max_closure_weeks, "school_closure_weeks"));
    return plan;
}

IntVector encode_h1n1(const H1N1Plan& plan) {
    const int f = grid_index(plan.vaccination_fraction, 0.1, "vaccination_fraction");
    if (f < 0 || f > 10) fail("vaccination_fraction outside [0, 1]");
    IntVector theta(kH1N1Dim);
    theta[0] = f;
    for (std::size_t g = 0; g < kAgeGroups; ++g) {
        if (plan.priorities[g] < 0 || plan.priorities[g] > 3) fail(std::string(kPriorityNames[g]) + " outside [0, 3]");
        theta[1 + g] = plan.priorities[g];
    }
    theta[6] = static_cast<int>(plan.antiviral);
    if (plan.school_closure_weeks < 0) fail("school_closure_weeks is negative");
    theta[7] = plan.school_closure_weeks;
    return theta;
}

BoxBounds covid_bounds(int sim_length_days, double tau) {
    if (sim_length_days < 2) fail("covid bounds: simulation length must be >= 2 days");
    const double len = sim_length_days;
    Vector lo, hi;
    for (std::size_t p = 0; p < kCovidPolicies; ++p) {
        lo.insert(lo.end(), {1.0, 1.0, 0.0});
        hi.insert(hi.end(), {len, len, 10.0});
    }
    return BoxBounds(std::move(lo), std::move(hi), tau);
}

void repair_windows(std::span<double> theta, const CovidLayout& layout) {
    for (const auto& [s, e] : layout.windows) {
        if (s >= theta.size() || e >= theta.size()) fail("repair_windows: layout index out of range");
        if (theta[e] < theta[s]) theta[s] = theta[e] - 1.0;
    }
}

Vector repair_windows(std::span<const double> theta, const CovidLayout& layout) {
    Vector out(theta.begin(), theta.end());
    repair_windows(std::span<double>(out), layout);
    return out;
}

IntVector normalize_covid_point(std::span<const std::int64_t> theta, int sim_length_days,
                                const CovidLayout& layout) {
    IntVector out(theta.begin(), theta.end());
    for (const auto& [s, e] : layout.windows) {
        if (out[e] < out[s]) out[s] = out[e] - 1;
        if (out[s] == out[e]) {
            if (out[s] > 1)
                --out[s];
            else
                ++out[e];
        }
        if (out[s] < 1) {
            out[s] = 1;
            out[e] = std::max<std::int64_t>(out[e], 2);
        }
        out[e] = std::min<std::int64_t>(out[e], sim_length_days);
    }
    return out;
}

CovidPlan decode_covid(std::span<const std::int64_t> theta, int sim_length_days) {
    if (theta.size() != kCovidDim) fail("decode_covid: expected 12 slots");
    std::array<PolicyWindow, kCovidPolicies> w;
    for (std::size_t p = 0; p < kCovidPolicies; ++p) {
        const std::size_t base = 3 * p;
        w[p].start_day = static_cast<int>(slot_in(theta, base, 1, sim_length_days, "start_day"));
        w[p].end_day = static_cast<int>(slot_in(theta, base + 1, 1, sim_length_days, "end_day"));
        w[p].intensity_percent = 10 * static_cast<int>(slot_in(theta, base + 2, 0, 10, "intensity"));
        if (w[p].start_day > w[p].end_day - 1) {
            std::ostringstream msg;
            msg << kPolicyNames[p] << ": start day " << w[p].start_day << " is not before end day "
                << w[p].end_day << " (windows must be repaired before decoding)";
            fail(msg.str());
        }
    }
    return CovidPlan{w[0], w[1], w[2], w[3]};
}

IntVector encode_covid(const CovidPlan& plan) {
    IntVector theta;
    theta.reserve(kCovidDim);
    const std::array<const PolicyWindow*, kCovidPolicies> ws{&plan.distancing, &plan.school_closure,
                                                           &plan.testing, &plan.tracing};
    for (std::size_t p = 0; p < kCovidPolicies; ++p) {
        const PolicyWindow& w = *ws[p];
        const int level = grid_index(w.intensity_percent, 10.0, "intensity_percent");
        if (level < 0 || level > 10) fail(std::string(kPolicyNames[p]) + ": intensity outside [0, 100]");
        if (w.start_day > w.end_day - 1) fail(std::string(kPolicyNames[p]) + ": start day must precede end day");
        theta.insert(theta.end(), {w.start_day, w.end_day, level});
    }
    return theta;
}

IntVector to_integers(std::span<const double> theta) {
    IntVector out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i]) || theta[i] != std::floor(theta[i])) {
            std::ostringstream msg;
            msg << "coordinate " << i << " = " << theta[i] << " is not an integer";
            fail(msg.str());
        }
        out[i] = static_cast<std::int64_t>(theta[i]);
    }
    return out;
}

void to_json(nlohmann::json& j, const H1N1Plan& plan) {
    j = nlohmann::json{{"vaccination_fraction", plan.vaccination_fraction},
                       {"priorities", plan.priorities},
                       {"antiviral_policy", std::string(to_string(plan.antiviral))},
                       {"school_closure_weeks", plan.school_closure_weeks}};
}

void from_json(const nlohmann::json& j, H1N1Plan& plan) {
    plan.vaccination_fraction = j.at("vaccination_fraction").get<double>();
    plan.priorities = j.at("priorities").get<std::array<int, kAgeGroups>>();
    plan.antiviral = antiviral_from_string(j.at("antiviral_policy").get<std::string>());
    plan.school_closure_weeks = j.at("school_closure_weeks").get<int>();
    encode_h1n1(plan);  // validates the grid
}

void to_json(nlohmann::json& j, const PolicyWindow& w) {
    j = nlohmann::json{{"start_day", w.start_day}, {"end_day", w.end_day}, {"intensity_percent", w.intensity_percent}};
}

void from_json(const nlohmann::json& j, PolicyWindow& w) {
    w.start_day = j.at("start_day").get<int>();
    w.end_day = j.at("end_day").get<int>();
    w.intensity_percent = j.at("intensity_percent").get<int>();
}

void to_json(nlohmann::json& j, const CovidPlan& plan) {
    j = nlohmann::json{{"distancing", plan.distancing},
                       {"school_closure", plan.school_closure},
                       {"testing", plan.testing},
                       {"tracing", plan.tracing}};
}

void from_json(const nlohmann::json& j, CovidPlan& plan) {
    plan.distancing = j.at("distancing").get<PolicyWindow>();
    plan.school_closure = j.at("school_closure").get<PolicyWindow>();
    plan.testing = j.at("testing").get<PolicyWindow>();
    plan.tracing = j.at("tracing").get<PolicyWindow>();
    encode_covid(plan);
}

} // namespace dspsa::codec
