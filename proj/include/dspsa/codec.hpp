#pragma once

// Box projection, the COVID window repair rule and the integer <-> plan maps.
//
// Canonical layouts:
//   H1N1  (p = 8):  [F, P_preschool, P_school, P_young_adult, P_older_adult, P_elderly, A, S]
//                   F slot n -> fraction n/10; A slot 0..3 -> none, treatment only, HHTAP100, HHTAP
//   COVID (p = 12): [D_start, D_end, D_level, S_start, S_end, S_level,
//                    T_start, T_end, T_level, C_start, C_end, C_level]
//                   level slot n -> intensity 10n percent; a policy is active on days
//                   start <= day < end.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspsa/dspsa.hpp"

namespace dspsa::codec {

class CodecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct BoxBounds {
    Vector lower;
    Vector upper;
    double tau = 0.5;

    BoxBounds() = default;
    BoxBounds(Vector lower, Vector upper, double tau = 0.5);

    std::size_t size() const noexcept { return lower.size(); }
    /// Throws CodecError unless l_i < u_i for all i and tau in (0, 1).
    void validate() const;
};

/// Piecewise box map: l if t < l, t if l <= t < u, u - tau if t >= u.
Vector project_box(std::span<const double> t, const BoxBounds& bounds);

/// project_box wrapped as a DSPSA projection (records upper clipping).
Projection box_projection(BoxBounds bounds);

// ---------------------------------------------------------------- H1N1

inline constexpr std::size_t kAgeGroups = 5;
inline constexpr std::size_t kH1N1Dim = 8;

enum class AntiviralPolicy : int { None = 0, TreatmentOnly = 1, HHTAP100 = 2, HHTAP = 3 };

std::string_view to_string(AntiviralPolicy policy);
AntiviralPolicy antiviral_from_string(std::string_view name);

/// Age group order everywhere: pre-school, school-age, young adults (19-29),
/// older adults (30-64), elderly.
struct H1N1Plan {
    double vaccination_fraction = 0.0;                 // F, one of 0.0, 0.1, ..., 1.0
    std::array<int, kAgeGroups> priorities{};          // 3 highest, 0 never vaccinated
    AntiviralPolicy antiviral = AntiviralPolicy::None;
    int school_closure_weeks = 0;

    bool operator==(const H1N1Plan&) const = default;
};

/// Box for the H1N1 vector; the closure slot is capped at max_closure_weeks.
BoxBounds h1n1_bounds(int max_closure_weeks, double tau = 0.5);

H1N1Plan decode_h1n1(std::span<const std::int64_t> theta, int max_closure_weeks = 25);
IntVector encode_h1n1(const H1N1Plan& plan);

// ---------------------------------------------------------------- COVID

inline constexpr std::size_t kCovidDim = 12;
inline constexpr std::size_t kCovidPolicies = 4;

struct PolicyWindow {
    int start_day = 1;
    int end_day = 2;
    int intensity_percent = 0;

    bool active_on(int day) const noexcept { return day >= start_day && day < end_day; }
    int duration_days() const noexcept { return end_day > start_day ? end_day - start_day : 0; }
    double level() const noexcept { return intensity_percent / 100.0; }

    bool operator==(const PolicyWindow&) const = default;
};

struct CovidPlan {
    PolicyWindow distancing;
    PolicyWindow school_closure;
    PolicyWindow testing;
    PolicyWindow tracing;

    bool operator==(const CovidPlan&) const = default;
};

/// (start, end) slot indices of each policy in the 12-vector.
struct CovidLayout {
    std::array<std::pair<std::size_t, std::size_t>, kCovidPolicies> windows{
        {{0, 1}, {3, 4}, {6, 7}, {9, 10}}};
    std::array<std::size_t, kCovidPolicies> intensities{2, 5, 8, 11};
};

BoxBounds covid_bounds(int sim_length_days, double tau = 0.5);

/// Whenever a policy's end day is strictly earlier than its start day, moves the
/// start to one day before the end. End days are never touched.
void repair_windows(std::span<double> theta, const CovidLayout& layout = {});
Vector repair_windows(std::span<const double> theta, const CovidLayout& layout = {});

/// Evaluation-point cleanup used by the COVID oracle: repair_windows, then any
/// window that is still empty (start == end) is widened to one day by moving the
/// start back, or the end forward when the start already sits on day 1.
IntVector normalize_covid_point(std::span<const std::int64_t> theta, int sim_length_days,
                                const CovidLayout& layout = {});

CovidPlan decode_covid(std::span<const std::int64_t> theta, int sim_length_days);
IntVector encode_covid(const CovidPlan& plan);

// ---------------------------------------------------------------- shared

using InterventionPlan = std::variant<H1N1Plan, CovidPlan>;

/// Converts an evaluation point to integers; throws CodecError if a coordinate
/// is not integral.
IntVector to_integers(std::span<const double> theta);

void to_json(nlohmann::json& j, const H1N1Plan& plan);
void from_json(const nlohmann::json& j, H1N1Plan& plan);
void to_json(nlohmann::json& j, const PolicyWindow& w);
void from_json(const nlohmann::json& j, PolicyWindow& w);
void to_json(nlohmann::json& j, const CovidPlan& plan);
void from_json(const nlohmann::json& j, CovidPlan& plan);

} // namespace dspsa::codec
