#pragma once

// Experiment configuration files. A config is a JSON document with a required
// schema_version and mode; every other section is optional and overrides the
// built-in defaults of that mode field by field. See configs/README.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspsa/campaign.hpp"
#include "dspsa/cost_model.hpp"
#include "dspsa/epi_sim.hpp"

namespace dspsa::config {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Daily contacts per person by layer. Household contacts are mean household size - 1.
struct ContactRates {
    double school = 14.0;
    double preschool = 6.0;
    double work = 5.0;
    double community = 3.0;
};

struct DeliveryWindow {
    int first_day = 1;
    int last_day = 1;  // inclusive
    std::int64_t doses_per_day = 0;
};

struct SupplySpec {
    bool unlimited = false;
    std::vector<DeliveryWindow> deliveries;

    epi::VaccineSupply build(int sim_length_days) const;
};

struct OptimizerSettings {
    std::size_t iterations = 10000;
    Vector theta0;
    /// When absent, a is tuned so that the first expected step is desired_step.
    std::optional<double> a;
    /// When absent, A = 10% of the iterations.
    std::optional<double> A;
    double alpha = 0.501;
    double desired_step = 0.5;
    std::size_t tuning_samples = 50;
    bool crn = false;
    double tau = 0.5;

    GainSchedule gains(double tuned_a) const;
};

struct CampaignSettings {
    std::size_t runs = 10;
    std::size_t ci_replicates = 500;
    double ci_level = 0.95;
    std::size_t baseline_replicates = 500;
    std::size_t crn_pairs = 200;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    epi::Mode mode = epi::Mode::H1N1;
    epi::PopulationConfig population;
    epi::EpiRates rates;
    ContactRates contacts;
    SupplySpec supply;
    cost::CostTable costs = cost::H1N1CostTable{};
    double loss_unit = 1e6;
    std::uint64_t seed = 42;
    OptimizerSettings optimizer;
    CampaignSettings campaign;
    std::vector<campaign::NamedPoint> baselines;

    /// Builds and calibrates the scenario. Throws ConfigError on invalid values.
    epi::Scenario scenario() const;
    std::unique_ptr<cost::EpidemicCostOracle> oracle() const;
    codec::BoxBounds bounds() const;
    Repair repair() const;
};

ExperimentConfig default_experiment(epi::Mode mode);

/// Parses and validates a config document. Error messages name the offending
/// key and, where it can be located, its line.
ExperimentConfig parse_experiment(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_experiment(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

} // namespace dspsa::config
