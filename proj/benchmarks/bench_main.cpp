// Microbenchmarks for the hot paths: daily-grid integration, loss
// evaluation, full model fits, environment stepping and network inference.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "epictrl/calib/fit.hpp"
#include "epictrl/env/mdp.hpp"
#include "epictrl/rl/agent.hpp"

using namespace epictrl;

namespace {

constexpr double kN = 1.38e9;
constexpr std::size_t kHorizon = 914;

sir::StringencySeries synthetic_stringency(std::size_t days)
{
    std::vector<double> v(days);
    for (std::size_t k = 0; k < days; ++k) {
        v[k] = 62.0 + 28.0 * std::sin(static_cast<double>(k) / 60.0);
    }
    return {Date(2020, 5, 1), std::move(v)};
}

sir::Compartments initial()
{
    return {kN - 7.5e5, 6e5, 1.5e5, kN};
}

calib::ObservedSeries synthetic_observed(const sir::StringencySeries& s)
{
    const auto traj =
        sir::integrate(initial(), sir::SirParams(0.316, 0.114), kHorizon, s);
    std::vector<double> sv, iv, rv;
    for (const auto& d : traj.days) {
        sv.push_back(d.s);
        iv.push_back(d.i);
        rv.push_back(d.r);
    }
    return {s.start_date(), std::move(sv), std::move(iv), std::move(rv), kN};
}

void BM_Integrate915Days(benchmark::State& state)
{
    const auto s = synthetic_stringency(kHorizon + 1);
    const sir::SirParams p(0.316, 0.114);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sir::integrate(initial(), p, kHorizon, s));
    }
}
BENCHMARK(BM_Integrate915Days);

void BM_LossEvaluation(benchmark::State& state)
{
    const auto s = synthetic_stringency(kHorizon + 1);
    const auto obs = synthetic_observed(s);
    const auto traj =
        sir::integrate(initial(), sir::SirParams(0.30, 0.11), kHorizon, s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calib::loss_sir(traj, obs));
    }
}
BENCHMARK(BM_LossEvaluation);

void BM_FitLockdown(benchmark::State& state)
{
    const auto s = synthetic_stringency(kHorizon + 1);
    const auto obs = synthetic_observed(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calib::fit_lockdown_sir(obs, s));
    }
}
BENCHMARK(BM_FitLockdown)->Unit(benchmark::kMillisecond);

env::EnvConfig bench_env_config()
{
    env::EnvConfig cfg;
    cfg.params = sir::SirParams(0.247, 0.0874);
    cfg.vaccination = sir::VaccinationSchedule::zero(Date(2020, 5, 1));
    cfg.gdp.a = -5.9664e-5;
    cfg.gdp.b = 6.6506e-3;
    cfg.gdp.c = -2.2311e-1;
    cfg.gdp.d = 101.357;
    cfg.init = initial();
    cfg.initial_stringency = 78.0;
    cfg.horizon = kHorizon;
    cfg.history_k = 30;
    return cfg;
}

void BM_EnvironmentStep(benchmark::State& state)
{
    env::Environment environment(bench_env_config());
    environment.reset();
    for (auto _ : state) {
        if (environment.done()) {
            state.PauseTiming();
            environment.reset();
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(environment.step(env::Action::noop()));
    }
}
BENCHMARK(BM_EnvironmentStep);

void BM_QNetworkForward(benchmark::State& state)
{
    env::Environment environment(bench_env_config());
    const auto st = environment.reset();
    const auto obs = rl::encode_state(st, 30);
    rl::QNetwork net(rl::QNetworkConfig{}, 42);
    const std::vector<rl::Observation> batch(64, obs);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(batch));
    }
}
BENCHMARK(BM_QNetworkForward)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
