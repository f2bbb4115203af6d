#include "dspsa/epi_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace dspsa::epi {

namespace {

std::int64_t binomial(Engine& rng, std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

/// Integer split of total proportional to weights (largest remainder).
template <std::size_t N>
std::array<std::int64_t, N> apportion(std::int64_t total, const std::array<double, N>& weights) {
    std::array<std::int64_t, N> out{};
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0 || sum <= 0.0) return out;
    std::array<double, N> rem{};
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
        rem[i] = exact - static_cast<double>(out[i]);
        assigned += out[i];
    }
    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % N) {
        if (weights[order[i]] > 0.0) {
            ++out[order[i]];
            ++assigned;
        }
    }
    for (std::size_t i = 0; assigned > total; i = (i + 1) % N) {
        if (out[order[N - 1 - i]] > 0) {
            --out[order[N - 1 - i]];
            --assigned;
        }
    }
    return out;
}

/// Removes up to `count` people from the per-age pools, drawing conditionally
/// binomially so the split is multinomial in proportion to the pool sizes.
std::array<std::int64_t, kAges> draw_from_pools(Engine& rng, std::int64_t count,
                                                const std::array<std::int64_t, kAges>& pools) {
    std::array<std::int64_t, kAges> taken{};
    std::int64_t remaining_pool = std::accumulate(pools.begin(), pools.end(), std::int64_t{0});
    std::int64_t remaining = std::min(count, remaining_pool);
    for (std::size_t a = 0; a < kAges && remaining > 0; ++a) {
        if (pools[a] == 0) continue;
        const std::int64_t x =
            a + 1 == kAges ? remaining
                           : binomial(rng, remaining, static_cast<double>(pools[a]) / static_cast<double>(remaining_pool));
        taken[a] = std::min(x, pools[a]);
        remaining -= taken[a];
        remaining_pool -= pools[a];
    }
    return taken;
}

void scale(ContactMatrix& m, double factor) {
    for (auto& row : m)
        for (double& v : row) v *= factor;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace

std::string to_string(Mode mode) { return mode == Mode::H1N1 ? "h1n1" : "covid"; }

Mode mode_from_string(const std::string& name) {
    if (name == "h1n1") return Mode::H1N1;
    if (name == "covid") return Mode::Covid;
    throw ConfigError("unknown mode '" + name + "' (expected h1n1 or covid)");
}

void PopulationConfig::validate() const {
    require(total_population > 0, "population: total_population must be > 0");
    const double sum = std::accumulate(age_fractions.begin(), age_fractions.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-9, "population: age_fractions must sum to 1");
    for (std::size_t a = 0; a < kAges; ++a) {
        require(age_fractions[a] >= 0.0, "population: age_fractions must be nonnegative");
        require(in_unit(high_risk_fraction_by_age[a]), "population: high_risk_fraction_by_age must lie in [0, 1]");
    }
    require(households_count > 0 && households_count <= total_population,
            "population: households_count must be in [1, total_population]");
    require(students_count >= 0, "population: students_count must be >= 0");
    require(communities_count >= 1, "population: communities_count must be >= 1");
    require(R0 >= 0.0, "population: R0 must be >= 0");
    require(mean_latent_days >= 1.0, "population: mean_latent_days must be >= 1");
    require(mean_infectious_days >= 1.0, "population: mean_infectious_days must be >= 1");
    require(sim_length_days >= 1, "population: sim_length_days must be >= 1");
    require(initial_infected >= 0 && initial_infected <= total_population,
            "population: initial_infected must be in [0, total_population]");
    require(in_unit(prevaccinated_fraction), "population: prevaccinated_fraction must lie in [0, 1]");
}

ContactMatrix ContactStructure::total() const {
    ContactMatrix t{};
    for (std::size_t a = 0; a < kAges; ++a)
        for (std::size_t b = 0; b < kAges; ++b)
            t[a][b] = household[a][b] + school[a][b] + work[a][b] + community[a][b];
    return t;
}

void EpiRates::validate() const {
    require(in_unit(symptomatic_fraction), "rates: symptomatic_fraction must lie in [0, 1]");
    require(in_unit(asymptomatic_relative_infectiousness),
            "rates: asymptomatic_relative_infectiousness must lie in [0, 1]");
    require(in_unit(icu_fraction_of_hospitalized), "rates: icu_fraction_of_hospitalized must lie in [0, 1]");
    require(in_unit(vaccine_efficacy), "rates: vaccine_efficacy must lie in [0, 1]");
    require(in_unit(antiviral_transmission_reduction), "rates: antiviral_transmission_reduction must lie in [0, 1]");
    require(in_unit(ascertainment_fraction), "rates: ascertainment_fraction must lie in [0, 1]");
    require(in_unit(household_infected_fraction), "rates: household_infected_fraction must lie in [0, 1]");
    require(in_unit(symptomatic_test_rate), "rates: symptomatic_test_rate must lie in [0, 1]");
    require(in_unit(screening_rate), "rates: screening_rate must lie in [0, 1]");
    require(in_unit(test_sensitivity), "rates: test_sensitivity must lie in [0, 1]");
    require(isolation_days >= 1, "rates: isolation_days must be >= 1");
    for (std::size_t a = 0; a < kAges; ++a) {
        for (std::size_t r = 0; r < kRisks; ++r) {
            require(in_unit(hospitalization_ratio[a][r]), "rates: hospitalization ratios must lie in [0, 1]");
            require(in_unit(fatality_ratio[a][r]), "rates: fatality ratios must lie in [0, 1]");
        }
        require(fatality_ratio[a][1] >= fatality_ratio[a][0],
                "rates: high-risk fatality ratio must be >= low-risk fatality ratio");
    }
}

std::int64_t VaccineSupply::delivered_on(int day) const {
    if (day < 1 || static_cast<std::size_t>(day) > daily_doses.size()) return 0;
    return daily_doses[static_cast<std::size_t>(day) - 1];
}

std::int64_t OutcomeSummary::total_infections() const {
    return std::accumulate(infections_by_age.begin(), infections_by_age.end(), std::int64_t{0});
}

std::int64_t OutcomeSummary::total_symptomatic() const {
    std::int64_t s = 0;
    for (const auto& row : symptomatic_by_age_risk) s += row[0] + row[1];
    return s;
}

std::int64_t OutcomeSummary::total_deaths() const {
    std::int64_t s = 0;
    for (const auto& row : deaths_by_age_risk) s += row[0] + row[1];
    return s;
}

std::int64_t AgeCell::compartment_total() const {
    return susceptible + vaccine_failed + exposed + symptomatic + asymptomatic + treated + isolated + recovered +
           protected_by_vaccine;
}

std::int64_t PopulationState::total_population() const {
    std::int64_t n = 0;
    for (const AgeCell& c : cells) n += c.compartment_total();
    return n;
}

bool PopulationState::epidemic_over() const {
    return std::all_of(cells.begin(), cells.end(), [](const AgeCell& c) { return c.exposed == 0 && c.infectious() == 0; });
}

PopulationState build_population(const PopulationConfig& config, std::uint64_t seed, double vaccine_efficacy) {
    config.validate();
    PopulationState state;
    const auto counts = apportion(config.total_population, config.age_fractions);
    const std::int64_t school_age = counts[1];
    if (config.students_count > school_age) {
        std::ostringstream msg;
        msg << "population: students_count " << config.students_count << " exceeds the school-age population "
            << school_age;
        throw ConfigError(msg.str());
    }
    for (std::size_t a = 0; a < kAges; ++a) {
        state.cells[a].population = counts[a];
        state.cells[a].susceptible = counts[a];
    }

    // Initial infections: multinomial over ages in proportion to group size.
    Engine rng = make_engine(mix(seed, 0x1D1A11));
    if (config.prevaccinated_fraction > 0.0) {
        for (auto& cell : state.cells) {
            const auto v = static_cast<std::int64_t>(std::llround(config.prevaccinated_fraction * static_cast<double>(cell.population)));
            const std::int64_t hit = binomial(rng, v, vaccine_efficacy);
            cell.susceptible -= v;
            cell.vaccinated = v;
            cell.protected_by_vaccine = hit;
            cell.vaccine_failed = v - hit;
        }
    }
    std::array<std::int64_t, kAges> pools{};
    for (std::size_t a = 0; a < kAges; ++a) pools[a] = state.cells[a].susceptible;
    const auto seeded = draw_from_pools(rng, config.initial_infected, pools);
    for (std::size_t a = 0; a < kAges; ++a) {
        state.cells[a].susceptible -= seeded[a];
        state.cells[a].exposed += seeded[a];
        state.outcome.infections_by_age[a] += seeded[a];
    }
    return state;
}

ContactStructure effective_contacts(int day, const codec::InterventionPlan& plan, const ContactStructure& base) {
    ContactStructure c = base;
    if (const auto* h = std::get_if<codec::H1N1Plan>(&plan)) {
        const int week = (day - 1) / 7 + 1;
        if (week <= h->school_closure_weeks) scale(c.school, 0.0);
    } else {
        const auto& cp = std::get<codec::CovidPlan>(plan);
        if (cp.distancing.active_on(day)) {
            const double keep = 1.0 - cp.distancing.level();
            scale(c.community, keep);
            scale(c.work, keep);
        }
        if (cp.school_closure.active_on(day)) scale(c.school, 1.0 - cp.school_closure.level());
    }
    return c;
}

double spectral_radius(const ContactMatrix& contacts, const AgeVector& age_fractions) {
    ContactMatrix m{};
    for (std::size_t a = 0; a < kAges; ++a)
        for (std::size_t b = 0; b < kAges; ++b)
            m[a][b] = age_fractions[b] > 0.0 ? contacts[a][b] * age_fractions[a] / age_fractions[b] : 0.0;

    // Power iteration on the nonnegative matrix; the (I + M) shift removes periodicity.
    AgeVector v;
    v.fill(1.0);
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        AgeVector w{};
        for (std::size_t a = 0; a < kAges; ++a) {
            w[a] = v[a];
            for (std::size_t b = 0; b < kAges; ++b) w[a] += m[a][b] * v[b];
        }
        const double norm = *std::max_element(w.begin(), w.end());
        if (norm <= 0.0) return 0.0;
        for (double& x : w) x /= norm;
        const double next = norm - 1.0;
        const bool converged = std::abs(next - lambda) <= 1e-14 * std::max(1.0, next);
        lambda = next;
        v = w;
        if (converged && it > 10) break;
    }
    return lambda;
}

double calibrate_beta(const PopulationConfig& config, const EpiRates& rates, const ContactStructure& contacts) {
    const double rho = spectral_radius(contacts.total(), config.age_fractions);
    const double infectiousness = rates.symptomatic_fraction +
                                  (1.0 - rates.symptomatic_fraction) * rates.asymptomatic_relative_infectiousness;
    const double denom = rho * config.mean_infectious_days * infectiousness;
    if (!(denom > 0.0)) throw ConfigError("calibrate_beta: contact structure has no transmission potential");
    return config.R0 / denom;
}

void Scenario::prepare() {
    population.validate();
    rates.validate();
    beta = calibrate_beta(population, rates, contacts);
}

void apply_vaccination(PopulationState& state, const codec::H1N1Plan& plan, const VaccineSupply& supply, int day,
                       double vaccine_efficacy, Engine& rng) {
    if (!supply.unlimited) state.dose_inventory += supply.delivered_on(day);
    for (int level = 3; level >= 1; --level) {
        std::array<double, kAges> room{};
        std::int64_t demand = 0;
        for (std::size_t a = 0; a < kAges; ++a) {
            if (plan.priorities[a] != level) continue;
            const AgeCell& c = state.cells[a];
            const auto target =
                static_cast<std::int64_t>(std::floor(plan.vaccination_fraction * static_cast<double>(c.population) + 1e-9));
            const std::int64_t r = std::max<std::int64_t>(0, target - c.vaccinated);
            room[a] = static_cast<double>(r);
            demand += r;
        }
        if (demand == 0) continue;
        const std::int64_t available = supply.unlimited ? demand : std::min(state.dose_inventory, demand);
        if (available == 0) break;
        const auto doses = apportion(available, room);
        for (std::size_t a = 0; a < kAges; ++a) {
            const std::int64_t d = std::min<std::int64_t>(doses[a], static_cast<std::int64_t>(room[a]));
            if (d == 0) continue;
            AgeCell& c = state.cells[a];
            const std::int64_t unvaccinated = c.population - c.vaccinated;
            // Doses go to random unvaccinated people; only susceptible recipients benefit.
            const std::int64_t hits = std::min(
                c.susceptible,
                binomial(rng, d, static_cast<double>(c.susceptible) / static_cast<double>(std::max<std::int64_t>(1, unvaccinated))));
            const std::int64_t protected_now = binomial(rng, hits, vaccine_efficacy);
            c.susceptible -= hits;
            c.protected_by_vaccine += protected_now;
            c.vaccine_failed += hits - protected_now;
            c.vaccinated += d;
            state.outcome.vaccines_used += d;
            if (!supply.unlimited) state.dose_inventory -= d;
        }
    }
}

namespace {

struct DailyFlows {
    std::array<std::int64_t, kAges> new_symptomatic{};
    std::int64_t detections = 0;
};

void treat_with_antivirals(PopulationState& state, const Scenario& sc, const codec::H1N1Plan& plan,
                           const DailyFlows& flows, Engine& rng) {
    using codec::AntiviralPolicy;
    if (plan.antiviral == AntiviralPolicy::None) return;
    const EpiRates& r = sc.rates;
    std::int64_t households = 0;
    for (std::size_t a = 0; a < kAges; ++a) {
        std::int64_t cases = binomial(rng, flows.new_symptomatic[a], r.ascertainment_fraction);
        if (plan.antiviral == AntiviralPolicy::HHTAP100) {
            // Drugs only reach the first 100 households with an ascertained case.
            cases = std::min(cases, std::max<std::int64_t>(0, 100 - state.hhtap_households));
            state.hhtap_households += cases;
        }
        AgeCell& c = state.cells[a];
        cases = std::min(cases, c.symptomatic);
        c.symptomatic -= cases;
        c.treated += cases;
        state.outcome.antiviral_courses_used += cases;
        households += cases;
    }
    if (plan.antiviral == AntiviralPolicy::TreatmentOnly || households == 0) return;

    const auto contacts = static_cast<std::int64_t>(
        std::llround(static_cast<double>(households) * std::max(0.0, sc.population.mean_household_size() - 1.0)));
    state.outcome.antiviral_courses_used += contacts;
    const std::int64_t infected_contacts = binomial(rng, contacts, r.household_infected_fraction);
    std::array<std::int64_t, kAges> pools{};
    for (std::size_t a = 0; a < kAges; ++a) pools[a] = state.cells[a].symptomatic + state.cells[a].asymptomatic;
    const auto taken = draw_from_pools(rng, infected_contacts, pools);
    for (std::size_t a = 0; a < kAges; ++a) {
        AgeCell& c = state.cells[a];
        const std::int64_t from_sym = std::min(c.symptomatic, binomial(rng, taken[a], pools[a] ? static_cast<double>(c.symptomatic) / pools[a] : 0.0));
        const std::int64_t from_asym = std::min(c.asymptomatic, taken[a] - from_sym);
        c.symptomatic -= from_sym;
        c.asymptomatic -= from_asym;
        c.treated += from_sym + from_asym;
    }
}

void isolate(PopulationState& state, std::size_t a, std::int64_t from_sym, std::int64_t from_asym) {
    AgeCell& c = state.cells[a];
    from_sym = std::min(from_sym, c.symptomatic);
    from_asym = std::min(from_asym, c.asymptomatic);
    c.symptomatic -= from_sym;
    c.asymptomatic -= from_asym;
    c.isolated += from_sym + from_asym;
}

void test_and_trace(PopulationState& state, const Scenario& sc, const codec::CovidPlan& plan, int day,
                    Engine& rng) {
    const EpiRates& r = sc.rates;
    std::int64_t detections = 0;
    if (plan.testing.active_on(day) && plan.testing.intensity_percent > 0) {
        const double level = plan.testing.level();
        for (std::size_t a = 0; a < kAges; ++a) {
            const std::int64_t tested = binomial(rng, state.cells[a].symptomatic, level * r.symptomatic_test_rate);
            const std::int64_t positive = binomial(rng, tested, r.test_sensitivity);
            state.outcome.tests_performed += tested;
            isolate(state, a, positive, 0);
            detections += positive;
        }
        std::int64_t free_population = 0;
        for (const AgeCell& c : state.cells) free_population += c.population - c.isolated;
        const double screen = level * r.screening_rate;
        state.outcome.tests_performed += binomial(rng, free_population, screen);
        for (std::size_t a = 0; a < kAges; ++a) {
            const std::int64_t ps = binomial(rng, state.cells[a].symptomatic, screen * r.test_sensitivity);
            const std::int64_t pa = binomial(rng, state.cells[a].asymptomatic, screen * r.test_sensitivity);
            isolate(state, a, ps, pa);
            detections += ps + pa;
        }
    }
    if (detections > 0 && plan.tracing.active_on(day) && plan.tracing.intensity_percent > 0) {
        const auto contacts = static_cast<std::int64_t>(
            std::llround(static_cast<double>(detections) * std::max(0.0, sc.population.mean_household_size() - 1.0)));
        const std::int64_t quarantined = binomial(rng, contacts, plan.tracing.level());
        state.outcome.traced_quarantines += quarantined;
        const std::int64_t infectious = binomial(rng, quarantined, r.household_infected_fraction);
        std::array<std::int64_t, kAges> pools{};
        for (std::size_t a = 0; a < kAges; ++a) pools[a] = state.cells[a].symptomatic + state.cells[a].asymptomatic;
        const auto taken = draw_from_pools(rng, infectious, pools);
        for (std::size_t a = 0; a < kAges; ++a) {
            if (taken[a] == 0) continue;
            const std::int64_t from_sym =
                binomial(rng, taken[a], static_cast<double>(state.cells[a].symptomatic) / static_cast<double>(pools[a]));
            isolate(state, a, from_sym, taken[a] - from_sym);
        }
    }
}

} // namespace

void step_day(PopulationState& state, const Scenario& sc, const ContactStructure& contacts,
              const codec::InterventionPlan& plan, int day, Engine& rng) {
    const PopulationConfig& pop = sc.population;
    const EpiRates& r = sc.rates;
    const ContactMatrix all = contacts.total();
    const double sigma = 1.0 / pop.mean_latent_days;
    const double gamma = 1.0 / pop.mean_infectious_days;
    // Isolated cases leave isolation after isolation_days on average.
    const double release = 1.0 / static_cast<double>(r.isolation_days);

    // Force of infection uses start-of-day counts.
    std::array<double, kAges> p_infect{};
    for (std::size_t a = 0; a < kAges; ++a) {
        double lambda = 0.0;
        for (std::size_t b = 0; b < kAges; ++b) {
            const AgeCell& c = state.cells[b];
            if (c.population == 0) continue;
            const double free = static_cast<double>(c.symptomatic) +
                                r.asymptomatic_relative_infectiousness * static_cast<double>(c.asymptomatic) +
                                (1.0 - r.antiviral_transmission_reduction) * static_cast<double>(c.treated);
            lambda += (all[a][b] * free + contacts.household[a][b] * static_cast<double>(c.isolated)) /
                      static_cast<double>(c.population);
        }
        p_infect[a] = 1.0 - std::exp(-sc.beta * lambda);
    }

    DailyFlows flows;
    std::int64_t new_infections = 0;
    for (std::size_t a = 0; a < kAges; ++a) {
        AgeCell& c = state.cells[a];
        const std::int64_t inf_s = binomial(rng, c.susceptible, p_infect[a]);
        const std::int64_t inf_f = binomial(rng, c.vaccine_failed, p_infect[a]);
        const std::int64_t onset = binomial(rng, c.exposed, sigma);
        const std::int64_t rec_s = binomial(rng, c.symptomatic, gamma);
        const std::int64_t rec_a = binomial(rng, c.asymptomatic, gamma);
        const std::int64_t rec_t = binomial(rng, c.treated, gamma);
        const std::int64_t rec_i = binomial(rng, c.isolated, gamma);
        const std::int64_t released = binomial(rng, c.isolated - rec_i, release);
        const std::int64_t sym = binomial(rng, onset, r.symptomatic_fraction);
        const std::int64_t high_risk = binomial(rng, sym, pop.high_risk_fraction_by_age[a]);

        c.susceptible -= inf_s;
        c.vaccine_failed -= inf_f;
        c.exposed += inf_s + inf_f - onset;
        c.symptomatic += sym - rec_s;
        // Released cases are past their symptomatic phase; they shed at the
        // asymptomatic rate until recovery.
        c.asymptomatic += onset - sym - rec_a + released;
        c.treated -= rec_t;
        c.isolated -= rec_i + released;
        c.recovered += rec_s + rec_a + rec_t + rec_i;

        state.outcome.infections_by_age[a] += inf_s + inf_f;
        state.outcome.symptomatic_by_age_risk[a][0] += sym - high_risk;
        state.outcome.symptomatic_by_age_risk[a][1] += high_risk;
        flows.new_symptomatic[a] = sym;
        new_infections += inf_s + inf_f;
    }
    state.outcome.per_day_new_infections.push_back(new_infections);

    if (const auto* h = std::get_if<codec::H1N1Plan>(&plan))
        treat_with_antivirals(state, sc, *h, flows, rng);
    else
        test_and_trace(state, sc, std::get<codec::CovidPlan>(plan), day, rng);
}

OutcomeSummary simulate(const codec::InterventionPlan& plan, const Scenario& scenario, std::uint64_t seed) {
    const bool h1n1_plan = std::holds_alternative<codec::H1N1Plan>(plan);
    if (h1n1_plan != (scenario.mode == Mode::H1N1))
        throw ConfigError("simulate: plan type does not match scenario mode " + to_string(scenario.mode));
    if (!(scenario.beta >= 0.0)) throw ConfigError("simulate: scenario not prepared");

    PopulationState state = build_population(scenario.population, seed, scenario.rates.vaccine_efficacy);
    Engine rng = make_engine(mix(seed, 0x51D0));
    const int horizon = scenario.population.sim_length_days;
    state.outcome.per_day_new_infections.reserve(static_cast<std::size_t>(horizon));

    for (int day = 1; day <= horizon; ++day) {
        if (h1n1_plan)
            apply_vaccination(state, std::get<codec::H1N1Plan>(plan), scenario.supply, day,
                              scenario.rates.vaccine_efficacy, rng);
        if (state.epidemic_over()) {
            state.outcome.per_day_new_infections.push_back(0);
            continue;
        }
        step_day(state, scenario, effective_contacts(day, plan, scenario.contacts), plan, day, rng);
    }

    // Severe outcomes per age x risk cell. Deaths are counted among the hospitalized.
    OutcomeSummary& out = state.outcome;
    const EpiRates& r = scenario.rates;
    for (std::size_t a = 0; a < kAges; ++a) {
        for (std::size_t k = 0; k < kRisks; ++k) {
            const std::int64_t sym = out.symptomatic_by_age_risk[a][k];
            const std::int64_t deaths = binomial(rng, sym, r.fatality_ratio[a][k]);
            const std::int64_t survivors_hosp = binomial(rng, sym - deaths, r.hospitalization_ratio[a][k]);
            out.deaths_by_age_risk[a][k] = deaths;
            out.hospitalized_count += deaths + survivors_hosp;
        }
    }
    out.icu_count = binomial(rng, out.hospitalized_count, r.icu_fraction_of_hospitalized);
    return out;
}

// ------------------------------------------------------------------ defaults

ContactStructure layered_contacts(const AgeVector& f, double household, double school, double preschool, double work,
                                  double community) {
    ContactStructure c;
    const double workers = f[2] + f[3];
    for (std::size_t a = 0; a < kAges; ++a) {
        for (std::size_t b = 0; b < kAges; ++b) {
            c.household[a][b] = household * f[b];
            c.community[a][b] = community * f[b];
            if ((a == 2 || a == 3) && (b == 2 || b == 3)) c.work[a][b] = work * f[b] / workers;
        }
    }
    c.school[1][1] = school;
    c.school[0][0] = preschool;
    return c;
}

Scenario h1n1_scenario() {
    Scenario s;
    s.mode = Mode::H1N1;
    PopulationConfig& p = s.population;
    p.total_population = 99617;
    p.students_count = 21976;
    const double school = 21976.0 / 99617.0;
    p.age_fractions = {0.068, school, 0.155, 0.0, 0.122};
    p.age_fractions[3] = 1.0 - (p.age_fractions[0] + school + p.age_fractions[2] + p.age_fractions[4]);
    p.high_risk_fraction_by_age = {0.05, 0.10, 0.15, 0.22, 0.47};
    p.households_count = 35578;  // ~2.8 people per household
    // 221,804 USD per community-week at 123 USD per student-day implies ~360.7
    // students per community, i.e. 61 communities for 21,976 students.
    p.communities_count = 61;
    p.R0 = 1.3;
    p.mean_latent_days = 1.9;
    p.mean_infectious_days = 4.1;
    p.sim_length_days = 175;
    p.initial_infected = 30;

    EpiRates& r = s.rates;
    r.symptomatic_fraction = 0.67;
    r.asymptomatic_relative_infectiousness = 0.5;
    r.hospitalization_ratio = {{{0.0030, 0.0200}, {0.0010, 0.0100}, {0.0020, 0.0150}, {0.0040, 0.0300}, {0.0080, 0.0400}}};
    r.fatality_ratio = {{{0.00003, 0.0003}, {0.00002, 0.0002}, {0.00005, 0.0005}, {0.0001, 0.0010}, {0.0003, 0.0030}}};
    r.icu_fraction_of_hospitalized = 0.10;
    r.vaccine_efficacy = 0.8;
    r.antiviral_transmission_reduction = 0.6;
    r.ascertainment_fraction = 0.5;
    r.household_infected_fraction = 0.15;

    s.contacts = layered_contacts(p.age_fractions, p.mean_household_size() - 1.0, 14.0, 6.0, 5.0, 3.0);

    // Deliveries from day 40 to day 95 totalling ~25,000 doses.
    s.supply.daily_doses.assign(175, 0);
    for (int day = 40; day <= 95; ++day) s.supply.daily_doses[static_cast<std::size_t>(day - 1)] = 450;
    s.prepare();
    return s;
}

Scenario covid_scenario() {
    Scenario s;
    s.mode = Mode::Covid;
    PopulationConfig& p = s.population;
    p.total_population = 100000;
    p.age_fractions = {0.060, 0.175, 0.145, 0.470, 0.150};
    p.high_risk_fraction_by_age = {0.05, 0.08, 0.15, 0.30, 0.60};
    p.households_count = 38500;  // ~2.6 people per household
    p.students_count = 17500;
    p.communities_count = 50;
    p.R0 = 2.5;
    p.mean_latent_days = 4.6;
    p.mean_infectious_days = 8.0;
    p.sim_length_days = 60;
    p.initial_infected = 50;

    EpiRates& r = s.rates;
    r.symptomatic_fraction = 0.6;
    r.asymptomatic_relative_infectiousness = 0.5;
    r.hospitalization_ratio = {{{0.005, 0.02}, {0.005, 0.02}, {0.02, 0.06}, {0.05, 0.15}, {0.15, 0.30}}};
    r.fatality_ratio = {{{0.0001, 0.0005}, {0.0001, 0.0005}, {0.0005, 0.002}, {0.004, 0.015}, {0.03, 0.08}}};
    r.icu_fraction_of_hospitalized = 0.25;
    r.vaccine_efficacy = 0.0;
    r.antiviral_transmission_reduction = 0.0;
    r.ascertainment_fraction = 0.0;
    r.household_infected_fraction = 0.2;
    r.symptomatic_test_rate = 0.5;
    r.screening_rate = 0.05;
    r.test_sensitivity = 0.9;
    r.isolation_days = 14;

    s.contacts = layered_contacts(p.age_fractions, p.mean_household_size() - 1.0, 10.0, 5.0, 6.0, 4.0);
    s.supply = VaccineSupply::none();
    s.prepare();
    return s;
}

Scenario homogeneous_scenario(double R0, std::int64_t population, std::int64_t initial_infected, int sim_length_days) {
    Scenario s;
    s.mode = Mode::H1N1;
    PopulationConfig& p = s.population;
    p.total_population = population;
    p.age_fractions = {0.2, 0.2, 0.2, 0.2, 0.2};
    p.high_risk_fraction_by_age = {0.1, 0.1, 0.1, 0.1, 0.1};
    p.households_count = std::max<std::int64_t>(1, population / 3);
    p.students_count = 0;
    p.communities_count = 1;
    p.R0 = R0;
    p.mean_latent_days = 1.9;
    p.mean_infectious_days = 4.1;
    p.sim_length_days = sim_length_days;
    p.initial_infected = initial_infected;

    EpiRates& r = s.rates;
    r.symptomatic_fraction = 1.0;
    r.vaccine_efficacy = 1.0;
    r.hospitalization_ratio = {{{0.01, 0.02}, {0.01, 0.02}, {0.01, 0.02}, {0.01, 0.02}, {0.01, 0.02}}};
    r.fatality_ratio = {{{0.0001, 0.001}, {0.0001, 0.001}, {0.0001, 0.001}, {0.0001, 0.001}, {0.0001, 0.001}}};

    // Proportionate mixing with one contact per day: spectral radius 1.
    for (std::size_t a = 0; a < kAges; ++a)
        for (std::size_t b = 0; b < kAges; ++b) s.contacts.community[a][b] = p.age_fractions[b];
    s.supply = VaccineSupply::without_limit();
    s.prepare();
    return s;
}

} // namespace dspsa::epi
