#include "dspsa/cost_model.hpp"

#include <cmath>
#include <sstream>

#include "dspsa/format.hpp"

namespace dspsa::cost {

namespace {

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0)) throw CostError(std::string("cost table: ") + name + " must be >= 0");
}

void validate_school(const SchoolClosureInputs& s) {
    require_nonnegative(s.makeup_class_per_student_day, "makeup_class_per_student_day");
    require_nonnegative(s.weekly_wage, "weekly_wage");
    require_nonnegative(s.days_missed_couple, "days_missed_couple");
    require_nonnegative(s.days_missed_single, "days_missed_single");
    if (!(s.couple_share >= 0.0 && s.couple_share <= 1.0))
        throw CostError("cost table: couple_share must lie in [0, 1]");
}

} // namespace

double school_closure_per_student_day(const SchoolClosureInputs& in) {
    const double daily_wage = in.weekly_wage / 5.0;
    const double days_missed =
        in.couple_share * in.days_missed_couple + (1.0 - in.couple_share) * in.days_missed_single;
    return std::round(in.makeup_class_per_student_day + daily_wage * days_missed / 5.0);
}

void H1N1CostTable::validate() const {
    for (const auto& row : nonhosp_medication_cost)
        for (double v : row) require_nonnegative(v, "nonhosp_medication_cost");
    require_nonnegative(hospital_day_cost, "hospital_day_cost");
    require_nonnegative(icu_day_cost, "icu_day_cost");
    require_nonnegative(hospital_days, "hospital_days");
    require_nonnegative(icu_days, "icu_days");
    if (!(icu_fraction >= 0.0 && icu_fraction <= 1.0)) throw CostError("cost table: icu_fraction must lie in [0, 1]");
    require_nonnegative(vaccine_dose_cost, "vaccine_dose_cost");
    require_nonnegative(adverse_event_cost_per_dose, "adverse_event_cost_per_dose");
    require_nonnegative(antiviral_course_cost, "antiviral_course_cost");
    require_nonnegative(school_closure_week_per_community, "school_closure_week_per_community");
    for (double v : death_cost_by_age) require_nonnegative(v, "death_cost_by_age");
    validate_school(school_closure);
}

double H1N1CostTable::expected_hospitalized_case_cost() const {
    return hospital_days * hospital_day_cost + icu_fraction * icu_days * icu_day_cost;
}

void CovidCostTable::validate() const {
    require_nonnegative(test_cost, "test_cost");
    require_nonnegative(tracing_national_annual_cost, "tracing_national_annual_cost");
    if (!(national_population > 0.0)) throw CostError("cost table: national_population must be > 0");
    require_nonnegative(nonhosp_treatment_cost, "nonhosp_treatment_cost");
    require_nonnegative(hosp_treatment_cost, "hosp_treatment_cost");
    require_nonnegative(value_of_statistical_life, "value_of_statistical_life");
    require_nonnegative(household_weekly_income, "household_weekly_income");
    require_nonnegative(distancing_income_drop_at_38, "distancing_income_drop_at_38");
    validate_school(school_closure);
}

void CostBreakdown::add(std::string name, double value) {
    components.emplace_back(std::move(name), value);
    total = 0.0;
    for (const auto& [n, v] : components) total += v;
}

double CostBreakdown::get(const std::string& name) const {
    for (const auto& [n, v] : components)
        if (n == name) return v;
    throw std::out_of_range("cost breakdown has no component '" + name + "'");
}

CostBreakdown h1n1_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                        const H1N1CostTable& table, const epi::PopulationConfig& population,
                        const epi::EpiRates& rates) {
    const auto* h = std::get_if<codec::H1N1Plan>(&plan);
    if (!h) throw CostError("h1n1_cost: plan is not an H1N1 plan");

    const double per_hospitalized = table.expected_hospitalized_case_cost();
    double medication = 0.0;
    double mortality = 0.0;
    for (std::size_t a = 0; a < epi::kAges; ++a) {
        for (std::size_t r = 0; r < epi::kRisks; ++r) {
            const auto sym = static_cast<double>(outcome.symptomatic_by_age_risk[a][r]);
            medication += sym * table.nonhosp_medication_cost[a][r];
            medication += sym * rates.hospitalization_ratio[a][r] * per_hospitalized;
            mortality += sym * rates.fatality_ratio[a][r] * table.death_cost_by_age[a];
        }
    }

    CostBreakdown b;
    b.add("medication", medication);
    b.add("vaccination", static_cast<double>(outcome.vaccines_used) *
                             (table.vaccine_dose_cost + table.adverse_event_cost_per_dose));
    b.add("antiviral", static_cast<double>(outcome.antiviral_courses_used) * table.antiviral_course_cost);
    b.add("school_closure", static_cast<double>(h->school_closure_weeks) *
                                static_cast<double>(population.communities_count) *
                                table.school_closure_week_per_community);
    b.add("mortality", mortality);
    return b;
}

CostBreakdown covid_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                         const CovidCostTable& table, const epi::PopulationConfig& population) {
    const auto* c = std::get_if<codec::CovidPlan>(&plan);
    if (!c) throw CostError("covid_cost: plan is not a COVID plan");

    const double pop = static_cast<double>(population.total_population);
    const double total_household_income =
        static_cast<double>(population.households_count) * table.household_weekly_income;
    const double distancing = c->distancing.intensity_percent / 38.0 * total_household_income *
                              table.distancing_income_drop_at_38 * c->distancing.duration_days() / 7.0;

    const double per_student_day = school_closure_per_student_day(table.school_closure);
    const double school = per_student_day * static_cast<double>(population.students_count) *
                          c->school_closure.duration_days() * c->school_closure.level();

    const double tracing = table.tracing_national_annual_cost * (pop / table.national_population) *
                           (c->tracing.duration_days() / 365.0) * c->tracing.level();

    const auto symptomatic = static_cast<double>(outcome.total_symptomatic());
    const auto hospitalized = static_cast<double>(outcome.hospitalized_count);
    const double treatment = table.nonhosp_treatment_cost * std::max(0.0, symptomatic - hospitalized) +
                             table.hosp_treatment_cost * hospitalized;

    CostBreakdown b;
    b.add("social_distancing", distancing);
    b.add("school_closure", school);
    b.add("testing", table.test_cost * static_cast<double>(outcome.tests_performed));
    b.add("contact_tracing", tracing);
    b.add("treatment", treatment);
    b.add("death", table.value_of_statistical_life * static_cast<double>(outcome.total_deaths()));
    return b;
}

CostBreakdown compute_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                           const CostTable& table, const epi::Scenario& scenario) {
    if (const auto* h = std::get_if<H1N1CostTable>(&table)) {
        if (scenario.mode != epi::Mode::H1N1) throw CostError("cost table is H1N1 but scenario is COVID");
        return h1n1_cost(outcome, plan, *h, scenario.population, scenario.rates);
    }
    if (scenario.mode != epi::Mode::Covid) throw CostError("cost table is COVID but scenario is H1N1");
    return covid_cost(outcome, plan, std::get<CovidCostTable>(table), scenario.population);
}

EpidemicCostOracle::EpidemicCostOracle(epi::Scenario scenario, CostTable table, double loss_unit)
    : scenario_(std::move(scenario)), table_(std::move(table)), loss_unit_(loss_unit) {
    if (!(loss_unit_ > 0.0)) throw CostError("oracle: loss_unit must be > 0");
    const bool h1n1_table = std::holds_alternative<H1N1CostTable>(table_);
    if (h1n1_table != (scenario_.mode == epi::Mode::H1N1))
        throw CostError("oracle: cost table and scenario modes differ");
    std::visit([](const auto& t) { t.validate(); }, table_);
    scenario_.prepare();
}

int EpidemicCostOracle::max_closure_weeks() const noexcept {
    return std::max(1, scenario_.population.sim_length_days / 7);
}

codec::InterventionPlan EpidemicCostOracle::decode(std::span<const double> theta) const {
    try {
        const IntVector ints = codec::to_integers(theta);
        if (scenario_.mode == epi::Mode::H1N1) return codec::decode_h1n1(ints, max_closure_weeks());
        const int len = scenario_.population.sim_length_days;
        return codec::decode_covid(codec::normalize_covid_point(ints, len), len);
    } catch (const codec::CodecError& e) {
        throw OracleError(std::string("cannot decode plan: ") + e.what());
    }
}

CostBreakdown EpidemicCostOracle::breakdown(std::span<const double> theta, std::uint64_t seed) const {
    const codec::InterventionPlan plan = decode(theta);
    const epi::OutcomeSummary outcome = epi::simulate(plan, scenario_, seed);
    return compute_cost(outcome, plan, table_, scenario_);
}

double EpidemicCostOracle::evaluate(std::span<const double> theta, std::uint64_t seed) const {
    return breakdown(theta, seed).total / loss_unit_;
}

std::unique_ptr<EpidemicCostOracle> make_oracle(epi::Scenario scenario, CostTable table, double loss_unit) {
    return std::make_unique<EpidemicCostOracle>(std::move(scenario), std::move(table), loss_unit);
}

H1N1CostTable default_h1n1_costs() {
    H1N1CostTable t;
    t.nonhosp_medication_cost = {{{45.0, 110.0}, {40.0, 100.0}, {35.0, 90.0}, {45.0, 120.0}, {70.0, 160.0}}};
    t.death_cost_by_age = {1.9e6, 2.0e6, 2.2e6, 1.4e6, 0.15e6};
    return t;
}

CovidCostTable default_covid_costs() { return CovidCostTable{}; }

nlohmann::json to_json(const CostBreakdown& b) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, value] : b.components) j[name] = value;
    j["total"] = b.total;
    return j;
}

std::string csv_header(const CostBreakdown& b) {
    std::ostringstream out;
    for (const auto& [name, value] : b.components) out << name << ',';
    out << "total";
    return out.str();
}

std::string csv_row(const CostBreakdown& b) {
    std::ostringstream out;
    for (const auto& [name, value] : b.components) out << format_number(value) << ',';
    out << format_number(b.total);
    return out.str();
}

} // namespace dspsa::cost
