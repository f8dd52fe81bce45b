#include "epictrl/calib/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epictrl/common/errors.hpp"

namespace epictrl::calib {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasible box enforced through the objective; Nelder-Mead never sees
// gradients so +inf outside the box is enough.
constexpr double kGammaFloor = 1e-8;
constexpr double kRateCeil = 10.0;
constexpr double kNuCeil = 1.0;

double halton(std::size_t index, std::size_t base)
{
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

bool params_feasible(double beta, double gamma)
{
    return beta >= 0.0 && beta <= kRateCeil && gamma >= kGammaFloor && gamma <= kRateCeil;
}

struct StartResult {
    NelderMeadResult nm;
    std::size_t seed_index = 0;
};

/// Runs Nelder-Mead from each seed and keeps the best (loss, then seed index).
StartResult multi_start(const Objective& objective,
                        const std::vector<std::vector<double>>& seeds,
                        const NelderMeadOptions& nm_opts)
{
    StartResult best;
    bool have = false;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        NelderMeadResult r;
        try {
            r = nelder_mead(objective, seeds[k], nm_opts);
        } catch (const FitError&) {
            continue; // infeasible seed
        }
        if (!have || r.value < best.nm.value) {
            best.nm = std::move(r);
            best.seed_index = k;
            have = true;
        }
    }
    if (!have) {
        throw FitError("no feasible multi-start seed");
    }
    return best;
}

FitResult fit_sir_family(const ObservedSeries& obs,
                         const std::optional<sir::StringencySeries>& stringency,
                         bool fit_nu, const std::optional<sir::VaccinationSchedule>& fixed_vax,
                         const FitOptions& opts)
{
    const std::size_t horizon = obs.size() - 1;
    const sir::Compartments init = obs.initial();

    auto simulate = [&](double beta, double gamma, double nu) {
        sir::SirParams p(beta, gamma);
        std::optional<sir::VaccinationSchedule> vax = fixed_vax;
        if (fit_nu) {
            vax = sir::VaccinationSchedule(obs.start_date(), 1,
                                           std::vector<double>{nu});
        }
        return sir::integrate(init, p, horizon, stringency, vax);
    };

    Objective objective = [&](const std::vector<double>& x) -> double {
        const double beta = x[0], gamma = x[1];
        const double nu = fit_nu ? x[2] : 0.0;
        if (!params_feasible(beta, gamma) || nu < 0.0 || nu > kNuCeil) {
            return kInf;
        }
        try {
            return loss_sir(simulate(beta, gamma, nu), obs);
        } catch (const Error&) {
            return kInf; // trial point collapsed the integration state
        }
    };

    std::vector<std::vector<double>> seeds;
    for (std::size_t k = 1; k <= opts.starts; ++k) {
        std::vector<double> seed{halton(k, 2), halton(k, 3)};
        if (fit_nu) {
            seed.push_back(halton(k, 5) * opts.nu_seed_hi);
        }
        seeds.push_back(std::move(seed));
    }

    const StartResult best = multi_start(objective, seeds, opts.nm);

    FitResult out;
    out.params = sir::SirParams(best.nm.argmin[0], best.nm.argmin[1]);
    if (fit_nu) {
        out.nu = best.nm.argmin[2];
    }
    out.nu_schedule = fixed_vax;
    const auto traj = simulate(best.nm.argmin[0], best.nm.argmin[1],
                               fit_nu ? best.nm.argmin[2] : 0.0);
    out.loss_sir = loss_sir(traj, obs);
    out.loss_i = loss_i(traj, obs);
    out.iterations = best.nm.iterations;
    out.converged = best.nm.converged;

    // With no infections in the data the transmission rate is unidentifiable:
    // the objective is flat in beta, so the reported beta is arbitrary and the
    // result is flagged as not converged.
    if (*std::max_element(obs.i().begin(), obs.i().end()) == 0.0) {
        out.converged = false;
    }
    return out;
}

sir::StringencySeries slice(const sir::StringencySeries& s, std::size_t first,
                            std::size_t count)
{
    std::vector<double> v(s.values().begin() + static_cast<long>(first),
                          s.values().begin() + static_cast<long>(first + count));
    return sir::StringencySeries(s.start_date() + static_cast<int>(first), std::move(v));
}

} // namespace

FitResult fit_simple_sir(const ObservedSeries& obs, const FitOptions& opts)
{
    return fit_sir_family(obs, std::nullopt, false, std::nullopt, opts);
}

FitResult fit_lockdown_sir(const ObservedSeries& obs,
                           const sir::StringencySeries& stringency, const FitOptions& opts)
{
    return fit_sir_family(obs, stringency, false, std::nullopt, opts);
}

FitResult fit_lockdown_vax_sir(const ObservedSeries& obs,
                               const sir::StringencySeries& stringency,
                               const FitOptions& opts)
{
    return fit_sir_family(obs, stringency, true, std::nullopt, opts);
}

FitResult refit_with_schedule(const ObservedSeries& obs,
                              const sir::StringencySeries& stringency,
                              const sir::VaccinationSchedule& vax, const FitOptions& opts)
{
    FitResult out = fit_sir_family(obs, stringency, false, vax, opts);
    return out;
}

WindowSearchResult window_search(const ObservedSeries& obs,
                                 const sir::StringencySeries& stringency, double beta,
                                 double gamma, const FitOptions& opts)
{
    const std::size_t transitions = obs.size() - 1;
    const sir::SirParams params(beta, gamma);

    WindowSearchResult result;
    for (int length = 5; length <= 50; length += 5) {
        if (static_cast<std::size_t>(length) > transitions) {
            continue; // window longer than the data
        }
        std::vector<double> rates;
        sir::Compartments state = obs.initial();
        std::size_t start = 0;
        while (start < transitions) {
            const std::size_t end =
                std::min(start + static_cast<std::size_t>(length), transitions);
            const std::size_t sub_horizon = end - start;
            const auto sub_str = slice(stringency, start, sub_horizon);

            Objective objective = [&](const std::vector<double>& x) -> double {
                const double nu = x[0];
                if (nu < 0.0 || nu > kNuCeil) {
                    return kInf;
                }
                auto vax = sir::VaccinationSchedule(sub_str.start_date(), 1,
                                                    std::vector<double>{nu});
                try {
                    const auto traj =
                        sir::integrate(state, params, sub_horizon, sub_str, vax);
                    return loss_sir_at(traj, obs, start);
                } catch (const Error&) {
                    return kInf; // trial rate collapsed the integration state
                }
            };

            std::vector<std::vector<double>> seeds;
            for (std::size_t k = 1; k <= 4; ++k) {
                seeds.push_back({halton(k, 2) * opts.nu_seed_hi});
            }
            const double nu = multi_start(objective, seeds, opts.nm).nm.argmin[0];
            rates.push_back(std::max(nu, 0.0));

            const auto vax = sir::VaccinationSchedule(sub_str.start_date(), 1,
                                                      std::vector<double>{rates.back()});
            state = sir::integrate(state, params, sub_horizon, sub_str, vax).days.back();
            start = end;
        }

        sir::VaccinationSchedule schedule(obs.start_date(), length, rates);
        const auto traj =
            sir::integrate(obs.initial(), params, transitions, stringency, schedule);
        result.entries.push_back(WindowEntry{length, schedule, loss_sir(traj, obs),
                                             loss_i(traj, obs)});
    }

    if (result.entries.empty()) {
        throw FitError("every window length exceeds the data span");
    }

    // Weighted choice: min-max scale both loss columns, equal weights.
    auto scale = [&](auto getter) {
        double lo = kInf, hi = -kInf;
        for (const auto& e : result.entries) {
            lo = std::min(lo, getter(e));
            hi = std::max(hi, getter(e));
        }
        std::vector<double> out;
        for (const auto& e : result.entries) {
            out.push_back(hi > lo ? (getter(e) - lo) / (hi - lo) : 0.0);
        }
        return out;
    };
    const auto ls = scale([](const WindowEntry& e) { return e.loss_sir; });
    const auto li = scale([](const WindowEntry& e) { return e.loss_i; });
    std::size_t best = 0;
    for (std::size_t k = 1; k < result.entries.size(); ++k) {
        if (0.5 * ls[k] + 0.5 * li[k] < 0.5 * ls[best] + 0.5 * li[best]) {
            best = k;
        }
    }
    result.chosen_length = result.entries[best].length;
    return result;
}

} // namespace epictrl::calib
