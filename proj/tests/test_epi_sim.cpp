#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dspsa/epi_sim.hpp"

using namespace dspsa;
using namespace dspsa::epi;

namespace {

codec::InterventionPlan h1n1_null() { return codec::H1N1Plan{}; }

codec::CovidPlan covid_null() { return codec::decode_covid(IntVector{1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0}, 60); }

std::int64_t compartments(const PopulationState& s) {
    std::int64_t total = 0;
    for (const auto& c : s.cells) total += c.compartment_total();
    return total;
}

struct Stats {
    double mean = 0.0;
    double se = 0.0;
};

template <class F>
Stats sample(int n, F&& f) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = f(static_cast<std::uint64_t>(i));
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1))};
}

} // namespace

TEST_CASE("default scenarios") {
    const Scenario h = h1n1_scenario();
    CHECK(h.population.total_population == 99617);
    CHECK(h.population.students_count == 21976);
    CHECK(h.population.R0 == 1.3);
    CHECK(h.population.sim_length_days == 175);
    CHECK(h.population.age_fractions[1] * 99617 == doctest::Approx(21976));

    const Scenario c = covid_scenario();
    CHECK(c.population.total_population == 100000);
    CHECK(c.population.sim_length_days == 60);
    CHECK(c.population.initial_infected == 50);
    CHECK(c.population.mean_latent_days == 4.6);

    for (const Scenario* s : {&h, &c})
        for (std::size_t a = 0; a < kAges; ++a) {
            CHECK(s->rates.fatality_ratio[a][1] >= s->rates.fatality_ratio[a][0]);
            CHECK(s->rates.hospitalization_ratio[a][1] >= s->rates.hospitalization_ratio[a][0]);
        }
}

TEST_CASE("build_population") {
    const Scenario h = h1n1_scenario();
    const PopulationState s = build_population(h.population, 1);
    CHECK(s.total_population() == 99617);
    CHECK(compartments(s) == 99617);

    const Scenario c = covid_scenario();
    const PopulationState cs = build_population(c.population, 1);
    std::int64_t exposed = 0;
    for (const auto& cell : cs.cells) exposed += cell.exposed;
    CHECK(exposed == 50);

    PopulationConfig young = c.population;
    young.age_fractions = {1, 0, 0, 0, 0};
    young.students_count = 0;
    const PopulationState ys = build_population(young, 3);
    CHECK(ys.cells[0].population == young.total_population);
    for (std::size_t a = 1; a < kAges; ++a) CHECK(ys.cells[a].population == 0);

    PopulationConfig crowded = c.population;
    crowded.students_count = 17501;
    CHECK_THROWS_AS(build_population(crowded, 1), ConfigError);

    PopulationConfig bad = c.population;
    bad.age_fractions = {0.5, 0.5, 0.5, 0, 0};
    CHECK_THROWS_AS(build_population(bad, 1), ConfigError);

    const PopulationState a = build_population(c.population, 9), b = build_population(c.population, 9);
    for (std::size_t i = 0; i < kAges; ++i) CHECK(a.cells[i].exposed == b.cells[i].exposed);
}

TEST_CASE("pre-vaccination protects the requested share") {
    Scenario s = homogeneous_scenario(1.3);
    s.population.prevaccinated_fraction = 0.25;
    const PopulationState st = build_population(s.population, 4, 1.0);
    std::int64_t protected_people = 0;
    for (const auto& c : st.cells) protected_people += c.protected_by_vaccine;
    CHECK(protected_people == 25000);
    CHECK(compartments(st) == 100000);
}

TEST_CASE("effective contacts") {
    const Scenario c = covid_scenario();
    const auto same = effective_contacts(10, covid_null(), c.contacts);
    CHECK(same.community == c.contacts.community);
    CHECK(same.work == c.contacts.work);

    auto plan = covid_null();
    plan.distancing = {5, 20, 100};
    auto during = effective_contacts(10, plan, c.contacts);
    for (std::size_t a = 0; a < kAges; ++a)
        for (std::size_t b = 0; b < kAges; ++b) {
            CHECK(during.community[a][b] == 0.0);
            CHECK(during.work[a][b] == 0.0);
            CHECK(during.household[a][b] == c.contacts.household[a][b]);
        }
    CHECK(effective_contacts(20, plan, c.contacts).community == c.contacts.community);

    plan.distancing = {5, 20, 40};
    plan.school_closure = {1, 30, 50};
    during = effective_contacts(10, plan, c.contacts);
    CHECK(during.community[2][3] == doctest::Approx(0.6 * c.contacts.community[2][3]));
    CHECK(during.school[1][1] == doctest::Approx(0.5 * c.contacts.school[1][1]));

    const Scenario h = h1n1_scenario();
    codec::H1N1Plan closure;
    closure.school_closure_weeks = 2;
    CHECK(effective_contacts(10, closure, h.contacts).school[1][1] == 0.0);
    CHECK(effective_contacts(14, closure, h.contacts).school[1][1] == 0.0);
    CHECK(effective_contacts(15, closure, h.contacts).school[1][1] == h.contacts.school[1][1]);
}

TEST_CASE("beta calibration") {
    const Scenario hom = homogeneous_scenario(1.3);
    CHECK(hom.beta == doctest::Approx(1.3 / hom.population.mean_infectious_days));

    ContactMatrix m{};
    for (auto& row : m) row.fill(0.2);
    CHECK(spectral_radius(m, {0.2, 0.2, 0.2, 0.2, 0.2}) == doctest::Approx(1.0));

    const Scenario h = h1n1_scenario();
    const double rho = spectral_radius(h.contacts.total(), h.population.age_fractions);
    const double infectiousness = h.rates.symptomatic_fraction +
                                  (1 - h.rates.symptomatic_fraction) * h.rates.asymptomatic_relative_infectiousness;
    CHECK(h.beta * rho * h.population.mean_infectious_days * infectiousness == doctest::Approx(1.3));
}

TEST_CASE("simulation is deterministic in the seed") {
    const Scenario h = h1n1_scenario();
    codec::H1N1Plan plan;
    plan.vaccination_fraction = 0.5;
    plan.priorities = {0, 3, 2, 0, 1};
    plan.antiviral = codec::AntiviralPolicy::HHTAP;
    const auto a = simulate(plan, h, 17), b = simulate(plan, h, 17);
    CHECK(a.symptomatic_by_age_risk == b.symptomatic_by_age_risk);
    CHECK(a.per_day_new_infections == b.per_day_new_infections);
    CHECK(a.vaccines_used == b.vaccines_used);
    CHECK(a.antiviral_courses_used == b.antiviral_courses_used);

    const auto other = simulate(plan, h, 18);
    CHECK(other.per_day_new_infections != a.per_day_new_infections);
}

TEST_CASE("outcome invariants") {
    const Scenario c = covid_scenario();
    auto plan = covid_null();
    plan.testing = {1, 30, 60};
    plan.tracing = {1, 30, 80};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto o = simulate(plan, c, seed);
        for (std::size_t a = 0; a < kAges; ++a)
            for (std::size_t r = 0; r < kRisks; ++r) {
                CHECK(o.deaths_by_age_risk[a][r] >= 0);
                CHECK(o.deaths_by_age_risk[a][r] <= o.symptomatic_by_age_risk[a][r]);
            }
        CHECK(o.hospitalized_count >= o.icu_count);
        CHECK(o.icu_count >= 0);
        CHECK(o.tests_performed > 0);
        CHECK(o.per_day_new_infections.size() == 60);
        CHECK(o.total_symptomatic() <= o.total_infections());
    }
}

TEST_CASE("compartments are conserved day by day") {
    const Scenario h = h1n1_scenario();
    codec::H1N1Plan plan;
    plan.vaccination_fraction = 0.7;
    plan.priorities = {1, 3, 2, 2, 3};
    plan.antiviral = codec::AntiviralPolicy::HHTAP100;
    PopulationState s = build_population(h.population, 5);
    Engine rng = make_engine(6);
    for (int day = 1; day <= h.population.sim_length_days; ++day) {
        apply_vaccination(s, plan, h.supply, day, h.rates.vaccine_efficacy, rng);
        step_day(s, h, effective_contacts(day, plan, h.contacts), plan, day, rng);
        REQUIRE(compartments(s) == 99617);
    }

    const Scenario c = covid_scenario();
    auto cp = covid_null();
    cp.testing = {1, 60, 100};
    cp.tracing = {1, 60, 100};
    PopulationState cs = build_population(c.population, 5);
    for (int day = 1; day <= 60; ++day) {
        step_day(cs, c, effective_contacts(day, cp, c.contacts), cp, day, rng);
        REQUIRE(compartments(cs) == 100000);
    }
}

TEST_CASE("no infectious people, no infections") {
    Scenario c = covid_scenario();
    c.population.initial_infected = 0;
    c.prepare();
    const auto o = simulate(covid_null(), c, 1);
    CHECK(o.total_infections() == 0);
    CHECK(o.total_deaths() == 0);

    Scenario zero = covid_scenario();
    zero.population.R0 = 0.0;
    zero.prepare();
    CHECK(zero.beta == 0.0);
    CHECK(simulate(covid_null(), zero, 1).total_infections() == 50);
}

TEST_CASE("vaccination allocation") {
    Scenario h = h1n1_scenario();
    CHECK(simulate(h1n1_null(), h, 2).vaccines_used == 0);

    h.supply = VaccineSupply::without_limit();
    codec::H1N1Plan school;
    school.vaccination_fraction = 1.0;
    school.priorities = {0, 3, 0, 0, 0};
    const auto o = simulate(school, h, 2);
    CHECK(static_cast<double>(o.vaccines_used) / 99617.0 == doctest::Approx(0.221).epsilon(0.01));

    codec::H1N1Plan half = school;
    half.vaccination_fraction = 0.5;
    CHECK(simulate(half, h, 2).vaccines_used <= 21976 / 2);

    // Priority 3 groups are served before priority 1 when doses are scarce.
    PopulationState s = build_population(h.population, 1);
    VaccineSupply scarce;
    scarce.daily_doses = {1000};
    codec::H1N1Plan ranked;
    ranked.vaccination_fraction = 1.0;
    ranked.priorities = {0, 1, 0, 3, 0};
    Engine rng = make_engine(1);
    apply_vaccination(s, ranked, scarce, 1, 0.8, rng);
    CHECK(s.cells[3].vaccinated == 1000);
    CHECK(s.cells[1].vaccinated == 0);
}

TEST_CASE("antiviral policies use courses") {
    const Scenario h = h1n1_scenario();
    codec::H1N1Plan plan;
    CHECK(simulate(plan, h, 4).antiviral_courses_used == 0);
    plan.antiviral = codec::AntiviralPolicy::TreatmentOnly;
    const auto treat_outcome = simulate(plan, h, 4);
    const auto treat = treat_outcome.antiviral_courses_used;
    plan.antiviral = codec::AntiviralPolicy::HHTAP;
    const auto hhtap_outcome = simulate(plan, h, 4);
    const auto hhtap = hhtap_outcome.antiviral_courses_used;
    plan.antiviral = codec::AntiviralPolicy::HHTAP100;
    const auto capped = simulate(plan, h, 4);
    CHECK(treat > 0);
    // Prophylaxis shrinks the epidemic, so it can end up using fewer courses.
    CHECK(hhtap > 0);
    CHECK(hhtap_outcome.total_infections() < treat_outcome.total_infections());
    // At most 100 households get drugs: the case plus the other members. Daily
    // rounding of household members can add at most one course per treatment day.
    CHECK(capped.antiviral_courses_used > 0);
    CHECK(capped.antiviral_courses_used <= std::llround(100 * h.population.mean_household_size()) + 100);
}

TEST_CASE("more distancing does not increase infections") {
    const Scenario c = covid_scenario();
    const int n = 200;
    Stats previous{1e18, 0};
    for (int level : {0, 30, 60, 90}) {
        auto plan = covid_null();
        plan.distancing = {1, 60, level};
        const Stats s = sample(n, [&](std::uint64_t seed) { return double(simulate(plan, c, seed).total_infections()); });
        CHECK(s.mean <= previous.mean + 3 * std::hypot(s.se, previous.se));
        previous = s;
    }
}

TEST_CASE("more vaccine does not increase symptomatic cases") {
    const Scenario h = h1n1_scenario();
    const int n = 200;
    Stats previous{1e18, 0};
    for (int f : {0, 2, 5, 10}) {
        codec::H1N1Plan plan;
        plan.vaccination_fraction = f / 10.0;
        plan.priorities = {3, 3, 3, 3, 3};
        const Stats s = sample(n, [&](std::uint64_t seed) { return double(simulate(plan, h, seed).total_symptomatic()); });
        CHECK(s.mean <= previous.mean + 3 * std::hypot(s.se, previous.se));
        previous = s;
    }
}

TEST_CASE("supercritical epidemic infects people") {
    const Scenario hom = homogeneous_scenario(1.3);
    const auto o = simulate(h1n1_null(), hom, 11);
    CHECK(o.total_infections() > hom.population.initial_infected);
}

TEST_CASE("mode mismatch is rejected") {
    CHECK_THROWS(simulate(covid_null(), h1n1_scenario(), 1));
    CHECK_THROWS(simulate(h1n1_null(), covid_scenario(), 1));
}
