#include "dspsa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace dspsa::config {

using nlohmann::json;

namespace {

// Best-effort line lookup: walks the object keys of a path through the raw text.
int locate_line(const std::string& text, const std::vector<std::string>& path) {
    std::size_t pos = 0;
    bool found = false;
    for (const std::string& key : path) {
        if (!key.empty() && std::isdigit(static_cast<unsigned char>(key[0]))) continue;
        const std::string quoted = '"' + key + '"';
        std::size_t at = pos;
        while (true) {
            at = text.find(quoted, at);
            if (at == std::string::npos) return 0;
            std::size_t after = at + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') break;
            at += quoted.size();
        }
        pos = at;
        found = true;
    }
    if (!found) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

struct Context {
    const std::string& text;
    const std::string& source;

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
        std::string pointer;
        for (const auto& p : path) pointer += '/' + p;
        if (pointer.empty()) pointer = "/";
        std::ostringstream msg;
        msg << source;
        if (const int line = locate_line(text, path); line > 0) msg << ':' << line;
        msg << ": " << pointer << ": " << what;
        throw ConfigError(msg.str());
    }
};

template <class T>
struct is_std_array : std::false_type {};
template <class T, std::size_t N>
struct is_std_array<std::array<T, N>> : std::true_type {};

template <class T>
struct is_std_vector : std::false_type {};
template <class T>
struct is_std_vector<std::vector<T>> : std::true_type {};

template <class T>
void convert(const json& v, T& out, std::vector<std::string>& path, const Context& ctx) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) ctx.fail(path, "expected true or false");
        out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) ctx.fail(path, "expected a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) ctx.fail(path, "expected a number");
        out = v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) ctx.fail(path, "expected a nonnegative integer");
        out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) ctx.fail(path, "expected an integer");
        out = v.get<T>();
    } else if constexpr (is_std_array<T>::value) {
        if (!v.is_array() || v.size() != out.size())
            ctx.fail(path, "expected an array of " + std::to_string(out.size()) + " elements");
        for (std::size_t i = 0; i < out.size(); ++i) {
            path.push_back(std::to_string(i));
            convert(v[i], out[i], path, ctx);
            path.pop_back();
        }
    } else if constexpr (is_std_vector<T>::value) {
        if (!v.is_array()) ctx.fail(path, "expected an array");
        out.resize(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            path.push_back(std::to_string(i));
            convert(v[i], out[i], path, ctx);
            path.pop_back();
        }
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
        if (v.is_null()) {
            out.reset();
        } else {
            double x = 0.0;
            convert(v, x, path, ctx);
            out = x;
        }
    } else {
        static_assert(sizeof(T) == 0, "unsupported config field type");
    }
}

/// Reads the known keys of one object and rejects the rest.
class Reader {
public:
    Reader(const json& j, std::vector<std::string> path, const Context& ctx) : j_(j), path_(std::move(path)), ctx_(ctx) {
        if (!j_.is_object()) ctx_.fail(path_, "expected an object");
    }

    template <class T>
    void operator()(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        path_.push_back(key);
        convert(*it, out, path_, ctx_);
        path_.pop_back();
    }

    template <class Fn>
    void section(const char* key, Fn&& fn) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        auto sub = path_;
        sub.push_back(key);
        Reader r(*it, sub, ctx_);
        fn(r);
        r.finish();
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (seen_.count(key)) continue;
            auto p = path_;
            p.push_back(key);
            ctx_.fail(p, "unknown key");
        }
    }

    std::vector<std::string> path_to(const char* key) const {
        auto p = path_;
        p.push_back(key);
        return p;
    }

private:
    const json& j_;
    std::vector<std::string> path_;
    const Context& ctx_;
    std::set<std::string> seen_;
};

/// Writes fields into a JSON object; mirrors Reader.
class Writer {
public:
    template <class T>
    void operator()(const char* key, const T& value) {
        if constexpr (std::is_same_v<T, std::optional<double>>)
            j[key] = value ? json(*value) : json(nullptr);
        else
            j[key] = value;
    }

    template <class Fn>
    void section(const char* key, Fn&& fn) {
        Writer w;
        fn(w);
        j[key] = std::move(w.j);
    }

    json j = json::object();
};

template <class V>
void population_fields(V& v, epi::PopulationConfig& p) {
    v("total_population", p.total_population);
    v("age_fractions", p.age_fractions);
    v("high_risk_fraction_by_age", p.high_risk_fraction_by_age);
    v("households_count", p.households_count);
    v("students_count", p.students_count);
    v("communities_count", p.communities_count);
    v("R0", p.R0);
    v("mean_latent_days", p.mean_latent_days);
    v("mean_infectious_days", p.mean_infectious_days);
    v("sim_length_days", p.sim_length_days);
    v("initial_infected", p.initial_infected);
    v("prevaccinated_fraction", p.prevaccinated_fraction);
}

template <class V>
void rates_fields(V& v, epi::EpiRates& r) {
    v("symptomatic_fraction", r.symptomatic_fraction);
    v("asymptomatic_relative_infectiousness", r.asymptomatic_relative_infectiousness);
    v("hospitalization_ratio", r.hospitalization_ratio);
    v("icu_fraction_of_hospitalized", r.icu_fraction_of_hospitalized);
    v("fatality_ratio", r.fatality_ratio);
    v("vaccine_efficacy", r.vaccine_efficacy);
    v("antiviral_transmission_reduction", r.antiviral_transmission_reduction);
    v("ascertainment_fraction", r.ascertainment_fraction);
    v("household_infected_fraction", r.household_infected_fraction);
    v("symptomatic_test_rate", r.symptomatic_test_rate);
    v("screening_rate", r.screening_rate);
    v("test_sensitivity", r.test_sensitivity);
    v("isolation_days", r.isolation_days);
}

template <class V>
void contact_fields(V& v, ContactRates& c) {
    v("school", c.school);
    v("preschool", c.preschool);
    v("work", c.work);
    v("community", c.community);
}

template <class V>
void school_fields(V& v, cost::SchoolClosureInputs& s) {
    v("makeup_class_per_student_day", s.makeup_class_per_student_day);
    v("weekly_wage", s.weekly_wage);
    v("days_missed_couple", s.days_missed_couple);
    v("days_missed_single", s.days_missed_single);
    v("couple_share", s.couple_share);
}

template <class V>
void h1n1_cost_fields(V& v, cost::H1N1CostTable& t) {
    v("nonhosp_medication_cost", t.nonhosp_medication_cost);
    v("hospital_day_cost", t.hospital_day_cost);
    v("icu_day_cost", t.icu_day_cost);
    v("hospital_days", t.hospital_days);
    v("icu_days", t.icu_days);
    v("icu_fraction", t.icu_fraction);
    v("vaccine_dose_cost", t.vaccine_dose_cost);
    v("adverse_event_cost_per_dose", t.adverse_event_cost_per_dose);
    v("antiviral_course_cost", t.antiviral_course_cost);
    v("school_closure_week_per_community", t.school_closure_week_per_community);
    v.section("school_closure", [&](auto& s) { school_fields(s, t.school_closure); });
    v("death_cost_by_age", t.death_cost_by_age);
}

template <class V>
void covid_cost_fields(V& v, cost::CovidCostTable& t) {
    v("test_cost", t.test_cost);
    v("tracing_national_annual_cost", t.tracing_national_annual_cost);
    v("national_population", t.national_population);
    v("nonhosp_treatment_cost", t.nonhosp_treatment_cost);
    v("hosp_treatment_cost", t.hosp_treatment_cost);
    v("value_of_statistical_life", t.value_of_statistical_life);
    v.section("school_closure", [&](auto& s) { school_fields(s, t.school_closure); });
    v("household_weekly_income", t.household_weekly_income);
    v("distancing_income_drop_at_38", t.distancing_income_drop_at_38);
}

template <class V>
void optimizer_fields(V& v, OptimizerSettings& o) {
    v("iterations", o.iterations);
    v("theta0", o.theta0);
    v("a", o.a);
    v("A", o.A);
    v("alpha", o.alpha);
    v("desired_step", o.desired_step);
    v("tuning_samples", o.tuning_samples);
    v("crn", o.crn);
    v("tau", o.tau);
}

template <class V>
void campaign_fields(V& v, CampaignSettings& c) {
    v("runs", c.runs);
    v("ci_replicates", c.ci_replicates);
    v("ci_level", c.ci_level);
    v("baseline_replicates", c.baseline_replicates);
    v("crn_pairs", c.crn_pairs);
}

std::size_t dimension(epi::Mode mode) { return mode == epi::Mode::H1N1 ? codec::kH1N1Dim : codec::kCovidDim; }

Vector to_vector(const IntVector& v) { return Vector(v.begin(), v.end()); }

std::vector<campaign::NamedPoint> default_baselines(epi::Mode mode) {
    if (mode == epi::Mode::H1N1) {
        return {{"hhtap_and_2_week_school_closure", {0, 0, 0, 0, 0, 0, 3, 2}},
                {"vaccinate_school_age_and_adults", {10, 0, 3, 0, 3, 0, 0, 0}},
                {"vaccinate_60_percent", {6, 3, 3, 3, 3, 3, 0, 0}},
                {"vaccinate_40_percent", {4, 3, 3, 3, 3, 3, 0, 0}}};
    }
    return {{"no_intervention", {1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0}},
            {"distancing_whole_horizon", {1, 60, 10, 1, 2, 0, 1, 2, 0, 1, 2, 0}},
            {"school_closure_whole_horizon", {1, 2, 0, 1, 60, 10, 1, 2, 0, 1, 2, 0}},
            {"testing_and_tracing_whole_horizon", {1, 2, 0, 1, 2, 0, 1, 60, 10, 1, 60, 10}}};
}

void check(bool ok, const Context& ctx, const std::vector<std::string>& path, const std::string& what) {
    if (!ok) ctx.fail(path, what);
}

void validate(const ExperimentConfig& c, const Context& ctx) {
    try {
        c.population.validate();
    } catch (const std::exception& e) {
        ctx.fail({"population"}, e.what());
    }
    try {
        c.rates.validate();
    } catch (const std::exception& e) {
        ctx.fail({"rates"}, e.what());
    }
    try {
        std::visit([](const auto& t) { t.validate(); }, c.costs);
    } catch (const std::exception& e) {
        ctx.fail({"costs"}, e.what());
    }
    const std::pair<const char*, double> layers[] = {{"school", c.contacts.school},
                                                     {"preschool", c.contacts.preschool},
                                                     {"work", c.contacts.work},
                                                     {"community", c.contacts.community}};
    for (const auto& [key, v] : layers) check(v >= 0.0, ctx, {"contacts", key}, "must be >= 0");
    for (std::size_t i = 0; i < c.supply.deliveries.size(); ++i) {
        const auto& d = c.supply.deliveries[i];
        check(d.first_day >= 1 && d.last_day >= d.first_day && d.doses_per_day >= 0, ctx,
              {"vaccine_supply", "deliveries", std::to_string(i)},
              "need 1 <= first_day <= last_day and doses_per_day >= 0");
    }
    check(c.loss_unit > 0.0, ctx, {"loss_unit"}, "must be > 0");

    const OptimizerSettings& o = c.optimizer;
    const std::size_t p = dimension(c.mode);
    check(o.iterations >= 1, ctx, {"optimizer", "iterations"}, "must be >= 1");
    check(o.theta0.size() == p, ctx, {"optimizer", "theta0"}, "expected " + std::to_string(p) + " components");
    for (double v : o.theta0) check(v == std::floor(v), ctx, {"optimizer", "theta0"}, "components must be integers");
    check(!o.a || *o.a > 0.0, ctx, {"optimizer", "a"}, "must be > 0");
    check(!o.A || *o.A >= 0.0, ctx, {"optimizer", "A"}, "must be >= 0");
    check(o.alpha > 0.0, ctx, {"optimizer", "alpha"}, "must be > 0");
    check(o.desired_step > 0.0, ctx, {"optimizer", "desired_step"}, "must be > 0");
    check(o.tuning_samples >= 1, ctx, {"optimizer", "tuning_samples"}, "must be >= 1");
    check(o.tau > 0.0 && o.tau < 1.0, ctx, {"optimizer", "tau"}, "must lie in (0, 1)");

    const CampaignSettings& k = c.campaign;
    check(k.runs >= 1, ctx, {"campaign", "runs"}, "must be >= 1");
    check(k.ci_replicates >= 2, ctx, {"campaign", "ci_replicates"}, "must be >= 2");
    check(k.ci_level > 0.0 && k.ci_level < 1.0, ctx, {"campaign", "ci_level"}, "must lie in (0, 1)");
    check(k.baseline_replicates >= 2, ctx, {"campaign", "baseline_replicates"}, "must be >= 2");
    check(k.crn_pairs >= 10, ctx, {"campaign", "crn_pairs"}, "must be >= 10");

    epi::Scenario scenario;
    try {
        scenario = c.scenario();
        epi::build_population(scenario.population, 0);
    } catch (const std::exception& e) {
        ctx.fail({"population"}, e.what());
    }

    const auto bounds = c.bounds();
    const auto in_box = [&](const Vector& t) {
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] < bounds.lower[i] || t[i] > bounds.upper[i]) return false;
        return true;
    };
    check(in_box(o.theta0), ctx, {"optimizer", "theta0"}, "outside the feasible box");
    const cost::EpidemicCostOracle probe(scenario, c.costs, c.loss_unit);
    for (std::size_t i = 0; i < c.baselines.size(); ++i) {
        const auto& b = c.baselines[i];
        const std::vector<std::string> path{"baselines", std::to_string(i)};
        check(!b.name.empty(), ctx, path, "name must not be empty");
        check(b.theta.size() == p, ctx, path, "expected " + std::to_string(p) + " components");
        check(in_box(b.theta), ctx, path, "outside the feasible box");
        try {
            probe.decode(b.theta);
        } catch (const std::exception& e) {
            ctx.fail(path, e.what());
        }
    }
}

campaign::NamedPoint parse_baseline(const json& j, std::vector<std::string> path, epi::Mode mode, const Context& ctx) {
    if (!j.is_object()) ctx.fail(path, "expected an object");
    campaign::NamedPoint point;
    for (const auto& [key, value] : j.items()) {
        if (key != "name" && key != "theta" && key != "plan") {
            path.push_back(key);
            ctx.fail(path, "unknown key");
        }
    }
    if (!j.contains("name")) ctx.fail(path, "missing name");
    path.push_back("name");
    convert(j["name"], point.name, path, ctx);
    path.pop_back();
    if (j.contains("theta") == j.contains("plan")) ctx.fail(path, "give exactly one of theta or plan");
    if (j.contains("theta")) {
        path.push_back("theta");
        convert(j["theta"], point.theta, path, ctx);
        return point;
    }
    path.push_back("plan");
    try {
        if (mode == epi::Mode::H1N1)
            point.theta = to_vector(codec::encode_h1n1(j["plan"].get<codec::H1N1Plan>()));
        else
            point.theta = to_vector(codec::encode_covid(j["plan"].get<codec::CovidPlan>()));
    } catch (const std::exception& e) {
        ctx.fail(path, e.what());
    }
    return point;
}

} // namespace

epi::VaccineSupply SupplySpec::build(int sim_length_days) const {
    if (unlimited) return epi::VaccineSupply::without_limit();
    epi::VaccineSupply s;
    if (deliveries.empty()) return s;
    s.daily_doses.assign(static_cast<std::size_t>(sim_length_days), 0);
    for (const DeliveryWindow& d : deliveries)
        for (int day = d.first_day; day <= std::min(d.last_day, sim_length_days); ++day)
            s.daily_doses[static_cast<std::size_t>(day - 1)] += d.doses_per_day;
    return s;
}

GainSchedule OptimizerSettings::gains(double tuned_a) const {
    const double stability = A ? *A : 0.1 * static_cast<double>(iterations);
    return GainSchedule(a ? *a : tuned_a, stability, alpha);
}

epi::Scenario ExperimentConfig::scenario() const {
    epi::Scenario s;
    s.mode = mode;
    s.population = population;
    s.rates = rates;
    s.population.validate();
    s.contacts = epi::layered_contacts(population.age_fractions, population.mean_household_size() - 1.0,
                                       contacts.school, contacts.preschool, contacts.work, contacts.community);
    s.supply = supply.build(population.sim_length_days);
    s.prepare();
    return s;
}

std::unique_ptr<cost::EpidemicCostOracle> ExperimentConfig::oracle() const {
    return cost::make_oracle(scenario(), costs, loss_unit);
}

codec::BoxBounds ExperimentConfig::bounds() const {
    if (mode == epi::Mode::H1N1)
        return codec::h1n1_bounds(std::max(1, population.sim_length_days / 7), optimizer.tau);
    return codec::covid_bounds(population.sim_length_days, optimizer.tau);
}

Repair ExperimentConfig::repair() const {
    if (mode == epi::Mode::H1N1) return {};
    return [](Vector& theta) { codec::repair_windows(std::span<double>(theta)); };
}

ExperimentConfig default_experiment(epi::Mode mode) {
    ExperimentConfig c;
    c.mode = mode;
    const epi::Scenario s = mode == epi::Mode::H1N1 ? epi::h1n1_scenario() : epi::covid_scenario();
    c.population = s.population;
    c.rates = s.rates;
    c.baselines = default_baselines(mode);
    if (mode == epi::Mode::H1N1) {
        c.contacts = {14.0, 6.0, 5.0, 3.0};
        c.supply.deliveries = {{40, 95, 450}};
        c.costs = cost::default_h1n1_costs();
        c.optimizer.iterations = 10000;
        c.optimizer.theta0 = {2, 0, 0, 0, 0, 0, 0, 0};
        c.optimizer.desired_step = 5.0;
        c.optimizer.crn = false;
        c.campaign.runs = 10;
    } else {
        c.contacts = {10.0, 5.0, 6.0, 4.0};
        c.costs = cost::default_covid_costs();
        c.optimizer.iterations = 5000;
        c.optimizer.theta0 = {1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
        c.optimizer.desired_step = 20.0;
        c.optimizer.crn = true;
        c.campaign.runs = 1;
    }
    return c;
}

ExperimentConfig parse_experiment(const std::string& text, const std::string& source) {
    const Context ctx{text, source};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (!doc.is_object()) ctx.fail({}, "expected an object");
    if (!doc.contains("schema_version")) ctx.fail({}, "missing required key schema_version");
    if (!doc.contains("mode")) ctx.fail({}, "missing required key mode");

    int version = 0;
    std::vector<std::string> path{"schema_version"};
    convert(doc["schema_version"], version, path, ctx);
    if (version != kSchemaVersion)
        ctx.fail(path, "unsupported schema_version " + std::to_string(version) + " (expected " +
                           std::to_string(kSchemaVersion) + ")");
    std::string mode_name;
    path = {"mode"};
    convert(doc["mode"], mode_name, path, ctx);
    epi::Mode mode{};
    try {
        mode = epi::mode_from_string(mode_name);
    } catch (const std::exception&) {
        ctx.fail(path, "mode must be h1n1 or covid");
    }

    ExperimentConfig c = default_experiment(mode);
    Reader top(doc, {}, ctx);
    int ignored_version = 0;
    std::string ignored_mode, description;
    top("schema_version", ignored_version);
    top("mode", ignored_mode);
    top("description", description);
    top("seed", c.seed);
    top("loss_unit", c.loss_unit);
    top.section("population", [&](Reader& r) { population_fields(r, c.population); });
    top.section("rates", [&](Reader& r) { rates_fields(r, c.rates); });
    top.section("contacts", [&](Reader& r) { contact_fields(r, c.contacts); });
    top.section("vaccine_supply", [&](Reader& r) {
        r("unlimited", c.supply.unlimited);
        if (const json* d = r.raw("deliveries")) {
            const auto base = r.path_to("deliveries");
            if (!d->is_array()) ctx.fail(base, "expected an array");
            c.supply.deliveries.clear();
            for (std::size_t i = 0; i < d->size(); ++i) {
                auto p = base;
                p.push_back(std::to_string(i));
                Reader w((*d)[i], p, ctx);
                DeliveryWindow win;
                w("first_day", win.first_day);
                w("last_day", win.last_day);
                w("doses_per_day", win.doses_per_day);
                w.finish();
                c.supply.deliveries.push_back(win);
            }
        }
    });
    top.section("costs", [&](Reader& r) {
        if (auto* h = std::get_if<cost::H1N1CostTable>(&c.costs))
            h1n1_cost_fields(r, *h);
        else
            covid_cost_fields(r, std::get<cost::CovidCostTable>(c.costs));
    });
    top.section("optimizer", [&](Reader& r) { optimizer_fields(r, c.optimizer); });
    top.section("campaign", [&](Reader& r) { campaign_fields(r, c.campaign); });
    if (const json* b = top.raw("baselines")) {
        if (!b->is_array()) ctx.fail({"baselines"}, "expected an array");
        c.baselines.clear();
        for (std::size_t i = 0; i < b->size(); ++i)
            c.baselines.push_back(parse_baseline((*b)[i], {"baselines", std::to_string(i)}, mode, ctx));
    }
    top.finish();

    validate(c, ctx);
    return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment(text.str(), path.string());
}

namespace {

// Plan vectors are integral; write them without a fractional part.
json integer_array(const Vector& v) {
    json a = json::array();
    for (double x : v) a.push_back(static_cast<std::int64_t>(std::llround(x)));
    return a;
}

} // namespace

json to_json(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    Writer w;
    w("schema_version", c.schema_version);
    w("mode", epi::to_string(c.mode));
    w("seed", c.seed);
    w("loss_unit", c.loss_unit);
    w.section("population", [&](Writer& s) { population_fields(s, c.population); });
    w.section("rates", [&](Writer& s) { rates_fields(s, c.rates); });
    w.section("contacts", [&](Writer& s) { contact_fields(s, c.contacts); });
    json deliveries = json::array();
    for (const auto& d : c.supply.deliveries)
        deliveries.push_back({{"first_day", d.first_day}, {"last_day", d.last_day}, {"doses_per_day", d.doses_per_day}});
    w.j["vaccine_supply"] = {{"unlimited", c.supply.unlimited}, {"deliveries", deliveries}};
    w.section("costs", [&](Writer& s) {
        if (auto* h = std::get_if<cost::H1N1CostTable>(&c.costs))
            h1n1_cost_fields(s, *h);
        else
            covid_cost_fields(s, std::get<cost::CovidCostTable>(c.costs));
    });
    w.section("optimizer", [&](Writer& s) { optimizer_fields(s, c.optimizer); });
    w.j["optimizer"]["theta0"] = integer_array(c.optimizer.theta0);
    w.section("campaign", [&](Writer& s) { campaign_fields(s, c.campaign); });
    json baselines = json::array();
    for (const auto& b : c.baselines) baselines.push_back({{"name", b.name}, {"theta", integer_array(b.theta)}});
    w.j["baselines"] = baselines;
    return w.j;
}

} // namespace dspsa::config
