#include "epictrl/env/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "epictrl/common/errors.hpp"

namespace epictrl::env {

Action::Action(int index) : index_(index)
{
    if (index < 0 || index >= kCount) {
        throw DomainError("action index must be in 0..6");
    }
}

RewardTerms reward(const EnvState& before, const EnvState& after, const RewardConfig& cfg)
{
    RewardTerms t;
    if (after.r_eff > cfg.re_high) {
        t.re_gdp_term = cfg.penalty_re_coeff * after.r_eff;
    } else if (after.r_eff >= cfg.re_mid) {
        t.re_gdp_term = cfg.gdp_mid_coeff * after.norm_gdp;
    } else {
        t.re_gdp_term = cfg.gdp_low_coeff * after.norm_gdp;
    }
    t.infection_term =
        after.i_prop > cfg.infect_threshold ? cfg.infect_penalty : cfg.infect_bonus;
    t.change_term = cfg.change_coeff * std::abs(after.stringency - before.stringency);
    return t;
}

Environment::Environment(EnvConfig config)
    : config_(std::move(config)), compartments_(config_.init)
{
    if (config_.params.gamma <= 0) {
        throw ConfigError("environment configured with non-positive gamma");
    }
    double lo = predict_gdp(config_.gdp, 0.0);
    double hi = lo;
    for (int s = 1; s <= 100; ++s) {
        const double v = predict_gdp(config_.gdp, static_cast<double>(s));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
        throw ConfigError("GDP model is constant; normalization undefined");
    }
    gdp_lo_ = lo;
    gdp_hi_ = hi;
}

double Environment::norm_gdp(double stringency) const
{
    return econ::min_max_normalize(predict_gdp(config_.gdp, stringency), gdp_lo_, gdp_hi_);
}

EnvState Environment::reset()
{
    compartments_ = config_.init;
    day_ = 0;
    started_ = true;
    state_ = EnvState{};
    state_.s_prop = compartments_.s_prop();
    state_.i_prop = compartments_.i_prop();
    state_.r_prop = compartments_.r_prop();
    state_.stringency = config_.initial_stringency;
    state_.norm_gdp = norm_gdp(state_.stringency);
    state_.r_eff = sir::effective_reproduction(config_.params, state_.stringency,
                                               compartments_.s, compartments_.n);
    state_.day_index = 0;
    return state_;
}

StepOutcome Environment::step(Action action)
{
    if (!started_) {
        throw ConfigError("step() before reset()");
    }
    if (done()) {
        throw EpisodeError("step() on a finished episode");
    }

    const EnvState before = state_;
    const double new_stringency =
        std::clamp(state_.stringency + action.delta(), 0.0, 100.0);

    // One day of epidemic dynamics at the new stringency level.
    const double nu = config_.vaccination.rate_at_day(day_);
    sir::StringencySeries day_series(config_.vaccination.start_date(),
                                     std::vector<double>{new_stringency});
    sir::VaccinationSchedule day_vax(day_series.start_date(), 1, std::vector<double>{nu});
    const auto traj = sir::integrate(compartments_, config_.params, 1, day_series, day_vax);
    compartments_ = traj.days.back();
    ++day_;

    EnvState next;
    next.s_prop = compartments_.s_prop();
    next.i_prop = compartments_.i_prop();
    next.r_prop = compartments_.r_prop();
    next.stringency = new_stringency;
    next.norm_gdp = norm_gdp(new_stringency);
    next.r_eff = sir::effective_reproduction(config_.params, new_stringency,
                                             compartments_.s, compartments_.n);
    next.day_index = day_;
    next.history = before.history;
    next.history.push_back(HistoryEntry{new_stringency, next.norm_gdp, next.r_eff,
                                        new_stringency - before.stringency});
    while (next.history.size() > config_.history_k) {
        next.history.pop_front();
    }
    state_ = next;

    StepOutcome out;
    out.reward_terms = reward(before, next, config_.reward);
    out.reward = out.reward_terms.total();
    out.state = next;
    out.done = done();
    out.day_index = day_;
    return out;
}

ReplayResult replay_historical(const EnvConfig& config,
                               const sir::StringencySeries& stringency)
{
    if (!stringency.covers(config.horizon)) {
        throw CoverageError("historical stringency does not cover the episode horizon");
    }
    Environment env(config);
    EnvState state = env.reset();

    ReplayResult result;
    result.outcomes.reserve(config.horizon);
    for (std::size_t day = 0; day < config.horizon; ++day) {
        // Target the historical level for the next day; pick the feasible
        // delta closest to the outstanding difference.
        const double target = stringency.at_day(day + 1);
        const double wanted = target - state.stringency;
        int best = 0;
        for (int a = 1; a < Action::kCount; ++a) {
            if (std::abs(Action::kDeltas[static_cast<std::size_t>(a)] - wanted) <
                std::abs(Action::kDeltas[static_cast<std::size_t>(best)] - wanted)) {
                best = a;
            }
        }
        StepOutcome out = env.step(Action(best));
        state = out.state;
        result.cumulative_reward += out.reward;
        result.outcomes.push_back(std::move(out));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Config file round trip

using nlohmann::json;

std::string EnvConfig::to_json_text() const
{
    json j;
    j["version"] = 1;
    j["beta"] = params.beta;
    j["gamma"] = params.gamma;
    j["vaccination"] = {{"start_date", vaccination.start_date().to_string()},
                        {"window_length", vaccination.window_length()},
                        {"rates", vaccination.rates()}};
    j["gdp"] = {{"a", gdp.a}, {"b", gdp.b}, {"c", gdp.c}, {"d", gdp.d}};
    j["init"] = {{"s", init.s}, {"i", init.i}, {"r", init.r}, {"n", init.n}};
    j["initial_stringency"] = initial_stringency;
    j["horizon"] = horizon;
    j["history_k"] = history_k;
    j["reward"] = {{"re_high", reward.re_high},
                   {"re_mid", reward.re_mid},
                   {"penalty_re_coeff", reward.penalty_re_coeff},
                   {"gdp_mid_coeff", reward.gdp_mid_coeff},
                   {"gdp_low_coeff", reward.gdp_low_coeff},
                   {"infect_threshold", reward.infect_threshold},
                   {"infect_penalty", reward.infect_penalty},
                   {"infect_bonus", reward.infect_bonus},
                   {"change_coeff", reward.change_coeff}};
    return j.dump(2);
}

EnvConfig EnvConfig::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid environment config: ") + e.what());
    }
    try {
        EnvConfig cfg;
        cfg.params = sir::SirParams(j.at("beta").get<double>(), j.at("gamma").get<double>());
        const auto& v = j.at("vaccination");
        cfg.vaccination = sir::VaccinationSchedule(
            Date::parse(v.at("start_date").get<std::string>()),
            v.at("window_length").get<int>(), v.at("rates").get<std::vector<double>>());
        const auto& g = j.at("gdp");
        cfg.gdp.a = g.at("a").get<double>();
        cfg.gdp.b = g.at("b").get<double>();
        cfg.gdp.c = g.at("c").get<double>();
        cfg.gdp.d = g.at("d").get<double>();
        const auto& i = j.at("init");
        cfg.init = sir::Compartments(i.at("s").get<double>(), i.at("i").get<double>(),
                                     i.at("r").get<double>(), i.at("n").get<double>());
        cfg.initial_stringency = j.at("initial_stringency").get<double>();
        cfg.horizon = j.at("horizon").get<std::size_t>();
        cfg.history_k = j.value("history_k", std::size_t{30});
        if (j.contains("reward")) {
            const auto& r = j["reward"];
            cfg.reward.re_high = r.value("re_high", cfg.reward.re_high);
            cfg.reward.re_mid = r.value("re_mid", cfg.reward.re_mid);
            cfg.reward.penalty_re_coeff =
                r.value("penalty_re_coeff", cfg.reward.penalty_re_coeff);
            cfg.reward.gdp_mid_coeff = r.value("gdp_mid_coeff", cfg.reward.gdp_mid_coeff);
            cfg.reward.gdp_low_coeff = r.value("gdp_low_coeff", cfg.reward.gdp_low_coeff);
            cfg.reward.infect_threshold =
                r.value("infect_threshold", cfg.reward.infect_threshold);
            cfg.reward.infect_penalty =
                r.value("infect_penalty", cfg.reward.infect_penalty);
            cfg.reward.infect_bonus = r.value("infect_bonus", cfg.reward.infect_bonus);
            cfg.reward.change_coeff = r.value("change_coeff", cfg.reward.change_coeff);
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("environment config missing field: ") + e.what());
    }
}

EnvConfig EnvConfig::from_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open environment config " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void EnvConfig::to_json_file(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write environment config " + path);
    }
    out << to_json_text() << "\n";
}

} // namespace epictrl::env
