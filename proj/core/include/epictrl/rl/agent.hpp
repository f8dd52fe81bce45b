#ifndef EPICTRL_RL_AGENT_HPP
#define EPICTRL_RL_AGENT_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epictrl/rl/network.hpp"
#include "epictrl/rl/replay.hpp"

namespace epictrl::rl {

struct TrainConfig {
    double discount = 0.99;
    std::size_t total_steps = 2742;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    /// 0 means "60% of total_steps".
    std::size_t epsilon_decay_steps = 0;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::size_t target_refresh = 250;
    std::size_t replay_capacity = 10000;
    std::size_t updates_per_step = 1;
    std::uint64_t seed = 0;
    /// Divergence guard: abort when the update loss stays above the ceiling
    /// for `divergence_patience` consecutive updates.
    double loss_ceiling = 1e6;
    std::size_t divergence_patience = 50;

    std::size_t effective_decay_steps() const
    {
        return epsilon_decay_steps > 0
                   ? epsilon_decay_steps
                   : static_cast<std::size_t>(0.6 * static_cast<double>(total_steps));
    }

    /// Linear epsilon schedule; monotone non-increasing. `step` is 1-based.
    double epsilon_at(std::size_t step) const
    {
        const auto decay = static_cast<double>(effective_decay_steps());
        if (decay <= 0) {
            return epsilon_end;
        }
        const double frac = std::min(1.0, static_cast<double>(step) / decay);
        return epsilon_start + frac * (epsilon_end - epsilon_start);
    }
};

/// Deterministic per-stream seed derivation from the single master seed
/// (splitmix64 over master xor stream id).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct TrainRecord {
    std::size_t step = 0;
    std::size_t episode = 0;
    double epsilon = 0.0;
    double loss = std::numeric_limits<double>::quiet_NaN();
    /// Set on the step that finished an episode.
    double episode_reward = std::numeric_limits<double>::quiet_NaN();
};

struct TrainLog {
    std::vector<TrainRecord> records;
    std::vector<double> episode_rewards;
    std::size_t updates = 0;

    std::string to_csv() const;
};

/// Greedy argmax over the 7 action values with ties broken by lowest index;
/// with probability epsilon a uniformly random action instead.
template <class Net, class Obs>
int act(const Net& net, const Obs& obs, double epsilon, std::mt19937_64& rng)
{
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw DomainError("epsilon must be a probability");
    }
    const MatrixXd q = net.forward(std::vector<Obs>{obs});
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(q.rows()) - 1);
            return pick(rng);
        }
    }
    int best = 0;
    for (int a = 1; a < q.rows(); ++a) {
        if (q(a, 0) > q(best, 0)) {
            best = a;
        }
    }
    return best;
}

/// One-step bootstrapped value learning with experience replay and a
/// periodically synchronized target copy. The adapter supplies encoded
/// observations; `online` and `target` must be structurally identical.
template <class EnvAdapter, class Net>
TrainLog train(EnvAdapter& env, Net& online, Net& target, const TrainConfig& cfg)
{
    using Obs = typename EnvAdapter::Obs;

    std::mt19937_64 rng_action(derive_seed(cfg.seed, 1));
    std::mt19937_64 rng_sample(derive_seed(cfg.seed, 2));

    ReplayBuffer<Obs> buffer(cfg.replay_capacity);
    target.copy_weights_from(online);

    TrainLog log;
    Obs obs = env.reset();
    double episode_reward = 0.0;
    std::size_t episode = 0;
    std::size_t bad_updates = 0;

    for (std::size_t step = 1; step <= cfg.total_steps; ++step) {
        TrainRecord rec;
        rec.step = step;
        rec.episode = episode;
        rec.epsilon = cfg.epsilon_at(step);

        const int action = act(online, obs, rec.epsilon, rng_action);
        const auto sr = env.step(action);
        buffer.push(Transition<Obs>{obs, action, sr.reward, sr.obs, sr.done});
        episode_reward += sr.reward;
        if (sr.done) {
            log.episode_rewards.push_back(episode_reward);
            rec.episode_reward = episode_reward;
            episode_reward = 0.0;
            ++episode;
            obs = env.reset();
        } else {
            obs = sr.obs;
        }

        if (buffer.size() >= cfg.batch_size) {
            for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
                const auto idx = buffer.sample_indices(cfg.batch_size, rng_sample);
                std::vector<Obs> states, next_states;
                std::vector<int> actions;
                states.reserve(idx.size());
                next_states.reserve(idx.size());
                for (std::size_t i : idx) {
                    states.push_back(buffer[i].state);
                    next_states.push_back(buffer[i].next_state);
                    actions.push_back(buffer[i].action);
                }
                const MatrixXd qn = target.forward(next_states);
                VectorXd targets(static_cast<Eigen::Index>(idx.size()));
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    const double boot =
                        buffer[idx[i]].done
                            ? 0.0
                            : qn.col(static_cast<Eigen::Index>(i)).maxCoeff();
                    targets(static_cast<Eigen::Index>(i)) =
                        buffer[idx[i]].reward + cfg.discount * boot;
                }
                rec.loss = online.train_step(states, actions, targets, cfg.learning_rate);
                ++log.updates;
                if (rec.loss > cfg.loss_ceiling) {
                    if (++bad_updates >= cfg.divergence_patience) {
                        throw FitError("value learning diverged: loss above " +
                                       std::to_string(cfg.loss_ceiling) + " for " +
                                       std::to_string(bad_updates) +
                                       " consecutive updates");
                    }
                } else {
                    bad_updates = 0;
                }
                if (log.updates % cfg.target_refresh == 0) {
                    target.copy_weights_from(online);
                }
            }
        }
        log.records.push_back(rec);
    }
    return log;
}

/// Adapter exposing the epidemic control environment through encoded
/// observations.
class EpidemicEnvAdapter {
public:
    using Obs = Observation;

    struct StepResult {
        Obs obs;
        double reward = 0.0;
        bool done = false;
    };

    explicit EpidemicEnvAdapter(env::Environment& environment) : env_(environment) {}

    Obs reset();
    StepResult step(int action);
    int action_count() const { return env::Action::kCount; }

private:
    env::Environment& env_;
};

struct RolloutResult {
    std::vector<env::StepOutcome> outcomes;
    double cumulative_reward = 0.0;
    double discounted_reward = 0.0;
};

/// Full-episode rollout of the greedy policy (epsilon = 0) or an
/// epsilon-soft policy when epsilon > 0.
RolloutResult rollout(const QNetwork& q, env::Environment& environment, bool greedy,
                      double epsilon = 0.0, std::uint64_t seed = 0);

/// Full-episode rollout of the uniform-random policy.
RolloutResult rollout_random(env::Environment& environment, std::uint64_t seed);

/// Sliding median with edge replication; k must be odd and <= series length.
std::vector<double> median_filter(const std::vector<double>& series, std::size_t k);

/// Checkpoint file bundling network weights and the training configuration.
void save_checkpoint(const std::string& path, const QNetwork& net, const TrainConfig& cfg);
struct Checkpoint {
    QNetwork net;
    TrainConfig cfg;
};
Checkpoint load_checkpoint(const std::string& path);

} // namespace epictrl::rl

#endif
