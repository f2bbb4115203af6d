#pragma once

// Societal cost of an epidemic outcome under an intervention plan, and the
// noisy loss oracle obtained by composing the simulator with it.

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspsa/codec.hpp"
#include "dspsa/dspsa.hpp"
#include "dspsa/epi_sim.hpp"

namespace dspsa::cost {

using epi::AgeRiskTable;
using epi::AgeVector;

/// Parents' lost-wage inputs of the per-student-day school closure cost.
struct SchoolClosureInputs {
    double makeup_class_per_student_day = 23.0;
    double weekly_wage = 980.0;
    double days_missed_couple = 2.5;
    double days_missed_single = 5.0;
    /// Share of affected students from two-parent households. Not published;
    /// 0.9757 is the centre of the interval that reproduces both 123 USD (980/week)
    /// and 125 USD (992/week) after rounding to whole dollars.
    double couple_share = 0.9757;
};

/// Make-up classes + daily parental wage x weighted days missed x 1/5,
/// rounded to whole dollars.
double school_closure_per_student_day(const SchoolClosureInputs& in);

struct H1N1CostTable {
    /// Expected non-hospitalized medication cost per symptomatic case. Placeholder values.
    AgeRiskTable nonhosp_medication_cost{};
    double hospital_day_cost = 2430.0;
    double icu_day_cost = 4960.0;
    double hospital_days = 5.0;
    double icu_days = 10.0;
    double icu_fraction = 0.10;
    double vaccine_dose_cost = 40.0;
    /// Expected cost of vaccine adverse events per dose. Placeholder.
    double adverse_event_cost_per_dose = 3.0;
    double antiviral_course_cost = 74.0;
    double school_closure_week_per_community = 221804.0;
    SchoolClosureInputs school_closure{};
    /// Present value of future earnings lost per death, by age. Placeholder.
    AgeVector death_cost_by_age{};

    void validate() const;
    /// Expected cost of one hospitalized case: every case stays hospital_days on
    /// the ward and icu_fraction of them additionally icu_days in the ICU.
    double expected_hospitalized_case_cost() const;
};

struct CovidCostTable {
    double test_cost = 36.0;
    double tracing_national_annual_cost = 3.6e9;
    double national_population = 331.0e6;
    double nonhosp_treatment_cost = 3994.0;
    double hosp_treatment_cost = 30000.0;
    double value_of_statistical_life = 9.3e6;
    SchoolClosureInputs school_closure{23.0, 992.0, 2.5, 5.0, 0.9757};
    /// Average weekly household income (census). Placeholder.
    double household_weekly_income = 1668.0;
    /// Fractional drop in weekly household income under the distancing bundle
    /// that cuts contacts by 38%. Placeholder.
    double distancing_income_drop_at_38 = 0.10;

    void validate() const;
};

using CostTable = std::variant<H1N1CostTable, CovidCostTable>;

struct CostBreakdown {
    std::vector<std::pair<std::string, double>> components;
    double total = 0.0;

    void add(std::string name, double value);
    double get(const std::string& name) const;
};

class CostError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

CostBreakdown h1n1_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                        const H1N1CostTable& table, const epi::PopulationConfig& population,
                        const epi::EpiRates& rates);

CostBreakdown covid_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                         const CovidCostTable& table, const epi::PopulationConfig& population);

CostBreakdown compute_cost(const epi::OutcomeSummary& outcome, const codec::InterventionPlan& plan,
                           const CostTable& table, const epi::Scenario& scenario);

/// Noisy loss oracle: decode theta, simulate with the seed, price the outcome.
/// The loss is reported in units of loss_unit dollars (default: millions).
class EpidemicCostOracle final : public NoisyLossOracle {
public:
    EpidemicCostOracle(epi::Scenario scenario, CostTable table, double loss_unit = 1e6);

    double evaluate(std::span<const double> theta, std::uint64_t seed) const override;

    codec::InterventionPlan decode(std::span<const double> theta) const;
    CostBreakdown breakdown(std::span<const double> theta, std::uint64_t seed) const;

    const epi::Scenario& scenario() const noexcept { return scenario_; }
    const CostTable& table() const noexcept { return table_; }
    double loss_unit() const noexcept { return loss_unit_; }
    /// Maximum school closure weeks (H1N1) = horizon in weeks.
    int max_closure_weeks() const noexcept;

private:
    epi::Scenario scenario_;
    CostTable table_;
    double loss_unit_;
};

std::unique_ptr<EpidemicCostOracle> make_oracle(epi::Scenario scenario, CostTable table, double loss_unit = 1e6);

H1N1CostTable default_h1n1_costs();
CovidCostTable default_covid_costs();

nlohmann::json to_json(const CostBreakdown& b);
std::string csv_header(const CostBreakdown& b);
std::string csv_row(const CostBreakdown& b);

} // namespace dspsa::cost
