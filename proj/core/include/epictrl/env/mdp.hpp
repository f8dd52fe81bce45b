#ifndef EPICTRL_ENV_MDP_HPP
#define EPICTRL_ENV_MDP_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "epictrl/econ/gdp.hpp"
#include "epictrl/sir/model.hpp"

namespace epictrl::env {

/// Discrete stringency adjustment. Exactly 7 actions.
class Action {
public:
    static constexpr std::array<double, 7> kDeltas = {-10.0, -5.0, -2.5, 0.0,
                                                      2.5,   5.0,  10.0};
    static constexpr int kCount = 7;

    explicit Action(int index);
    int index() const { return index_; }
    double delta() const { return kDeltas[static_cast<std::size_t>(index_)]; }

    static Action noop() { return Action(3); }

private:
    int index_ = 3;
};

/// Reward constants; defaults follow the composite reward definition.
struct RewardConfig {
    double re_high = 1.5;
    double re_mid = 1.25;
    double penalty_re_coeff = -20.0;
    double gdp_mid_coeff = 100.0;
    double gdp_low_coeff = 200.0;
    double infect_threshold = 0.003;
    double infect_penalty = -2000.0;
    double infect_bonus = 50.0;
    double change_coeff = -12.0;
};

struct HistoryEntry {
    double stringency = 0.0;
    double norm_gdp = 0.0;
    double r_eff = 0.0;
    double action_delta = 0.0;
};

struct EnvState {
    double s_prop = 0.0;
    double i_prop = 0.0;
    double r_prop = 0.0;
    double stringency = 0.0;
    double norm_gdp = 0.0;
    double r_eff = 0.0;
    std::deque<HistoryEntry> history; // most recent at the back, length <= K
    std::size_t day_index = 0;
};

struct RewardTerms {
    double re_gdp_term = 0.0;
    double infection_term = 0.0;
    double change_term = 0.0;

    double total() const { return re_gdp_term + infection_term + change_term; }
};

struct StepOutcome {
    EnvState state;
    double reward = 0.0;
    RewardTerms reward_terms;
    bool done = false;
    std::size_t day_index = 0;
};

/// Everything needed to instantiate the control environment.
struct EnvConfig {
    sir::SirParams params;
    sir::VaccinationSchedule vaccination{sir::VaccinationSchedule::zero(Date(2020, 5, 1))};
    econ::GdpModel gdp;
    sir::Compartments init;
    double initial_stringency = 0.0;
    std::size_t horizon = 0; // number of daily transitions in an episode
    RewardConfig reward;
    std::size_t history_k = 30;

    /// Structured config-file round trip (JSON schema documented in the README).
    static EnvConfig from_json_file(const std::string& path);
    static EnvConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void to_json_file(const std::string& path) const;
};

/// Composite reward on the post-transition state; the stringency-change
/// penalty uses the realized change between the two states.
RewardTerms reward(const EnvState& before, const EnvState& after, const RewardConfig& cfg);

/// Episodic single-writer environment around the fitted epidemic and GDP
/// models. One instance runs one episode at a time.
class Environment {
public:
    explicit Environment(EnvConfig config);

    EnvState reset();
    StepOutcome step(Action action);

    const EnvState& current() const { return state_; }
    bool done() const { return day_ >= config_.horizon; }
    const EnvConfig& config() const { return config_; }

    /// Min-max bounds used to normalize predicted GDP, computed once over
    /// integer stringency 0..100.
    double gdp_lo() const { return gdp_lo_; }
    double gdp_hi() const { return gdp_hi_; }

private:
    EnvConfig config_;
    EnvState state_;
    sir::Compartments compartments_;
    std::size_t day_ = 0;
    bool started_ = false;
    double gdp_lo_ = 0.0;
    double gdp_hi_ = 1.0;

    double norm_gdp(double stringency) const;
};

struct ReplayResult {
    std::vector<StepOutcome> outcomes;
    double cumulative_reward = 0.0;
};

/// Replays a historical stringency series through the environment: each day
/// the target change is converted to the nearest feasible action delta, with
/// the remainder carried forward. This is the baseline an agent must beat.
ReplayResult replay_historical(const EnvConfig& config,
                               const sir::StringencySeries& stringency);

} // namespace epictrl::env

#endif
