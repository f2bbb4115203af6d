#pragma once

// Desk-scale stochastic epidemic simulator used as the noisy part of the loss
// oracle. Cell-level chain-binomial SEIR over five age groups with household,
// school, work and community contact layers. It stands in for a full
// agent-based model: it keeps the discrete-input, stochastic-output character
// of one at a fraction of the cost, and is not a replica of any of them.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dspsa/codec.hpp"
#include "dspsa/seeding.hpp"

namespace dspsa::epi {

inline constexpr std::size_t kAges = codec::kAgeGroups;
inline constexpr std::size_t kRisks = 2;  // 0 = low risk, 1 = high risk

using AgeVector = std::array<double, kAges>;
using AgeRiskTable = std::array<std::array<double, kRisks>, kAges>;
using AgeRiskCounts = std::array<std::array<std::int64_t, kRisks>, kAges>;
using ContactMatrix = std::array<std::array<double, kAges>, kAges>;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Mode { H1N1, Covid };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct PopulationConfig {
    std::int64_t total_population = 100000;
    AgeVector age_fractions{0.2, 0.2, 0.2, 0.2, 0.2};
    AgeVector high_risk_fraction_by_age{};
    std::int64_t households_count = 38000;
    std::int64_t students_count = 20000;
    std::int64_t communities_count = 50;
    double R0 = 1.3;
    double mean_latent_days = 1.9;
    double mean_infectious_days = 4.1;
    int sim_length_days = 175;
    std::int64_t initial_infected = 10;
    /// Share of every age group vaccinated before day 1 (not priced as doses used).
    double prevaccinated_fraction = 0.0;

    void validate() const;
    double mean_household_size() const {
        return static_cast<double>(total_population) / static_cast<double>(households_count);
    }
};

/// Daily contact rates C[a][b]: contacts a member of age a has with age b.
struct ContactStructure {
    ContactMatrix household{};
    ContactMatrix school{};
    ContactMatrix work{};
    ContactMatrix community{};

    ContactMatrix total() const;
};

/// Disease and response parameters. Ratios are per symptomatic case.
struct EpiRates {
    double symptomatic_fraction = 0.67;
    double asymptomatic_relative_infectiousness = 0.5;
    AgeRiskTable hospitalization_ratio{};
    double icu_fraction_of_hospitalized = 0.10;
    AgeRiskTable fatality_ratio{};
    double vaccine_efficacy = 0.8;
    double antiviral_transmission_reduction = 0.6;
    /// Fraction of new symptomatic cases ascertained (antiviral policies).
    double ascertainment_fraction = 0.5;
    /// Probability that a household contact of a case is itself infectious.
    double household_infected_fraction = 0.15;
    /// Daily probability that a free symptomatic case gets tested at 100% testing intensity.
    double symptomatic_test_rate = 0.5;
    /// Daily fraction of the free population screened at 100% testing intensity.
    double screening_rate = 0.05;
    double test_sensitivity = 0.9;
    int isolation_days = 14;

    void validate() const;
};

/// Per-day vaccine deliveries (index 0 = day 1). Unused doses carry over.
struct VaccineSupply {
    std::vector<std::int64_t> daily_doses;
    bool unlimited = false;

    static VaccineSupply none() { return {}; }
    static VaccineSupply without_limit() { return VaccineSupply{{}, true}; }
    std::int64_t delivered_on(int day) const;
};

struct OutcomeSummary {
    AgeRiskCounts symptomatic_by_age_risk{};
    AgeRiskCounts deaths_by_age_risk{};
    std::int64_t hospitalized_count = 0;
    std::int64_t icu_count = 0;
    std::int64_t vaccines_used = 0;
    std::int64_t antiviral_courses_used = 0;
    std::int64_t tests_performed = 0;
    std::int64_t traced_quarantines = 0;
    std::array<std::int64_t, kAges> infections_by_age{};
    std::vector<std::int64_t> per_day_new_infections;

    std::int64_t total_infections() const;
    std::int64_t total_symptomatic() const;
    std::int64_t total_deaths() const;
};

/// Compartments of one age group. Everything is a head count.
struct AgeCell {
    std::int64_t population = 0;
    std::int64_t susceptible = 0;         // never vaccinated
    std::int64_t vaccine_failed = 0;      // vaccinated, still susceptible
    std::int64_t exposed = 0;
    std::int64_t symptomatic = 0;         // infectious, free
    std::int64_t asymptomatic = 0;        // infectious, free
    std::int64_t treated = 0;             // infectious, on antivirals
    std::int64_t isolated = 0;            // infectious, household contacts only
    std::int64_t recovered = 0;
    std::int64_t protected_by_vaccine = 0;
    std::int64_t vaccinated = 0;          // doses received (not a compartment)

    std::int64_t compartment_total() const;
    std::int64_t infectious() const { return symptomatic + asymptomatic + treated + isolated; }
};

struct PopulationState {
    std::array<AgeCell, kAges> cells{};
    std::int64_t dose_inventory = 0;
    std::int64_t hhtap_households = 0;
    OutcomeSummary outcome;

    std::int64_t total_population() const;
    bool epidemic_over() const;
};

/// Splits the population across age cells (largest remainder rounding) and
/// seeds initial_infected latent infections proportionally across ages.
/// Pre-vaccinated people are protected with probability vaccine_efficacy.
PopulationState build_population(const PopulationConfig& config, std::uint64_t seed, double vaccine_efficacy = 1.0);

/// Layer scaling for a given day under a plan.
ContactStructure effective_contacts(int day, const codec::InterventionPlan& plan, const ContactStructure& base);

/// Household contacts spread over all ages; school contacts inside the school-age
/// group (preschool inside the youngest group); work contacts among the two adult
/// groups; community contacts with everybody. Mixing is proportionate to age share.
ContactStructure layered_contacts(const AgeVector& age_fractions, double household, double school, double preschool,
                                  double work, double community);

/// Largest eigenvalue of the next-generation pattern M[a][b] = C[a][b] N_a / N_b.
double spectral_radius(const ContactMatrix& contacts, const AgeVector& age_fractions);

/// Transmission rate per contact-day such that the next-generation matrix of
/// the full contact structure has spectral radius R0.
double calibrate_beta(const PopulationConfig& config, const EpiRates& rates, const ContactStructure& contacts);

/// Everything that stays fixed over a simulation.
struct Scenario {
    Mode mode = Mode::H1N1;
    PopulationConfig population;
    EpiRates rates;
    ContactStructure contacts;
    VaccineSupply supply;
    double beta = 0.0;  // filled by prepare()

    /// Validates and calibrates beta.
    void prepare();
};

void step_day(PopulationState& state, const Scenario& scenario, const ContactStructure& contacts,
              const codec::InterventionPlan& plan, int day, Engine& rng);

void apply_vaccination(PopulationState& state, const codec::H1N1Plan& plan, const VaccineSupply& supply,
                       int day, double vaccine_efficacy, Engine& rng);

/// Runs the whole horizon. Deterministic in (plan, scenario, seed).
OutcomeSummary simulate(const codec::InterventionPlan& plan, const Scenario& scenario, std::uint64_t seed);

// Default scenarios. Disease timing and outcome tables are placeholders; see
// configs/README.md for provenance.
Scenario h1n1_scenario();
Scenario covid_scenario();
/// Single-layer proportionate mixing, every infection symptomatic, long horizon.
Scenario homogeneous_scenario(double R0, std::int64_t population = 100000, std::int64_t initial_infected = 20,
                              int sim_length_days = 730);

} // namespace dspsa::epi
