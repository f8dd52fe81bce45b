#include "epictrl/rl/agent.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace epictrl::rl {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    // splitmix64 finalizer over master xor a stream tag.
    std::uint64_t z = master ^ (stream * 0x9E3779B97F4A7C15ull);
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::string TrainLog::to_csv() const
{
    std::ostringstream out;
    out << "step,episode,epsilon,loss,episode_reward\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.step << ',' << r.episode << ',' << r.epsilon << ',';
        if (std::isnan(r.loss)) {
            out << "";
        } else {
            out << r.loss;
        }
        out << ',';
        if (!std::isnan(r.episode_reward)) {
            out << r.episode_reward;
        }
        out << '\n';
    }
    return out.str();
}

EpidemicEnvAdapter::Obs EpidemicEnvAdapter::reset()
{
    return encode_state(env_.reset(), env_.config().history_k);
}

EpidemicEnvAdapter::StepResult EpidemicEnvAdapter::step(int action)
{
    const auto out = env_.step(env::Action(action));
    return StepResult{encode_state(out.state, env_.config().history_k), out.reward,
                      out.done};
}

namespace {

RolloutResult run_policy(env::Environment& environment,
                         const std::function<int(const env::EnvState&)>& policy,
                         double discount)
{
    RolloutResult res;
    environment.reset();
    double gamma_pow = 1.0;
    while (!environment.done()) {
        const int a = policy(environment.current());
        auto out = environment.step(env::Action(a));
        res.cumulative_reward += out.reward;
        res.discounted_reward += gamma_pow * out.reward;
        gamma_pow *= discount;
        res.outcomes.push_back(std::move(out));
    }
    return res;
}

} // namespace

RolloutResult rollout(const QNetwork& q, env::Environment& environment, bool greedy,
                      double epsilon, std::uint64_t seed)
{
    std::mt19937_64 rng(derive_seed(seed, 3));
    const std::size_t k = environment.config().history_k;
    const double eps = greedy ? 0.0 : epsilon;
    return run_policy(
        environment,
        [&](const env::EnvState& s) { return act(q, encode_state(s, k), eps, rng); },
        0.99);
}

RolloutResult rollout_random(env::Environment& environment, std::uint64_t seed)
{
    std::mt19937_64 rng(derive_seed(seed, 4));
    std::uniform_int_distribution<int> pick(0, env::Action::kCount - 1);
    return run_policy(
        environment, [&](const env::EnvState&) { return pick(rng); }, 0.99);
}

std::vector<double> median_filter(const std::vector<double>& series, std::size_t k)
{
    if (k % 2 == 0) {
        throw DomainError("median filter window must be odd");
    }
    if (k > series.size()) {
        throw DomainError("median filter window larger than the series");
    }
    if (k == 1) {
        return series;
    }
    const std::size_t half = k / 2;
    const auto n = static_cast<long>(series.size());
    std::vector<double> out(series.size());
    std::vector<double> window(k);
    for (long t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
            // Edge replication keeps the output the same length as the input.
            const long src = std::clamp(t - static_cast<long>(half) + static_cast<long>(j),
                                        0l, n - 1);
            window[j] = series[static_cast<std::size_t>(src)];
        }
        std::nth_element(window.begin(), window.begin() + static_cast<long>(half),
                         window.end());
        out[static_cast<std::size_t>(t)] = window[half];
    }
    return out;
}

namespace {

using nlohmann::json;

json train_config_to_json(const TrainConfig& cfg)
{
    return json{{"discount", cfg.discount},
                {"total_steps", cfg.total_steps},
                {"epsilon_start", cfg.epsilon_start},
                {"epsilon_end", cfg.epsilon_end},
                {"epsilon_decay_steps", cfg.epsilon_decay_steps},
                {"batch_size", cfg.batch_size},
                {"learning_rate", cfg.learning_rate},
                {"target_refresh", cfg.target_refresh},
                {"replay_capacity", cfg.replay_capacity},
                {"updates_per_step", cfg.updates_per_step},
                {"seed", cfg.seed},
                {"loss_ceiling", cfg.loss_ceiling},
                {"divergence_patience", cfg.divergence_patience}};
}

TrainConfig train_config_from_json(const json& j)
{
    TrainConfig cfg;
    cfg.discount = j.value("discount", cfg.discount);
    cfg.total_steps = j.value("total_steps", cfg.total_steps);
    cfg.epsilon_start = j.value("epsilon_start", cfg.epsilon_start);
    cfg.epsilon_end = j.value("epsilon_end", cfg.epsilon_end);
    cfg.epsilon_decay_steps = j.value("epsilon_decay_steps", cfg.epsilon_decay_steps);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.target_refresh = j.value("target_refresh", cfg.target_refresh);
    cfg.replay_capacity = j.value("replay_capacity", cfg.replay_capacity);
    cfg.updates_per_step = j.value("updates_per_step", cfg.updates_per_step);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.loss_ceiling = j.value("loss_ceiling", cfg.loss_ceiling);
    cfg.divergence_patience = j.value("divergence_patience", cfg.divergence_patience);
    return cfg;
}

} // namespace

void save_checkpoint(const std::string& path, const QNetwork& net, const TrainConfig& cfg)
{
    json j;
    j["version"] = 1;
    j["network"] = json::parse(net.to_json_text());
    j["train_config"] = train_config_to_json(cfg);
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write checkpoint " + path);
    }
    out << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open checkpoint " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid checkpoint: ") + e.what());
    }
    if (j.value("version", 0) != 1) {
        throw ParseError("unsupported checkpoint version");
    }
    return Checkpoint{QNetwork::from_json_text(j.at("network").dump()),
                      train_config_from_json(j.at("train_config"))};
}

} // namespace epictrl::rl
