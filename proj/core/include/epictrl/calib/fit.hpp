#ifndef EPICTRL_CALIB_FIT_HPP
#define EPICTRL_CALIB_FIT_HPP

#include <optional>
#include <vector>

#include "epictrl/calib/loss.hpp"
#include "epictrl/calib/nelder_mead.hpp"
#include "epictrl/sir/model.hpp"

namespace epictrl::calib {

struct FitResult {
    sir::SirParams params;
    std::optional<double> nu;                              // constant-rate variant
    std::optional<sir::VaccinationSchedule> nu_schedule;   // time-varying variant
    double loss_sir = 0.0;
    double loss_i = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct FitOptions {
    NelderMeadOptions nm;
    /// Number of quasi-random multi-start seeds; the best result wins.
    std::size_t starts = 8;
    /// Parameter upper bounds for seeding: beta, gamma in [0, 1], nu in [0, nu_seed_hi].
    double nu_seed_hi = 0.01;
};

/// Plain SIR fit over (beta, gamma).
FitResult fit_simple_sir(const ObservedSeries& obs, const FitOptions& opts = {});

/// Lockdown-modulated SIR fit over (beta, gamma).
FitResult fit_lockdown_sir(const ObservedSeries& obs, const sir::StringencySeries& stringency,
                           const FitOptions& opts = {});

/// Lockdown SIR with a constant vaccination rate; fits (beta, gamma, nu).
FitResult fit_lockdown_vax_sir(const ObservedSeries& obs,
                               const sir::StringencySeries& stringency,
                               const FitOptions& opts = {});

/// Re-fit of (beta, gamma) with the vaccination rate fixed to a schedule.
FitResult refit_with_schedule(const ObservedSeries& obs,
                              const sir::StringencySeries& stringency,
                              const sir::VaccinationSchedule& vax,
                              const FitOptions& opts = {});

struct WindowEntry {
    int length = 0;
    sir::VaccinationSchedule schedule;
    double loss_sir = 0.0;
    double loss_i = 0.0;
};

struct WindowSearchResult {
    std::vector<WindowEntry> entries; // window lengths 5, 10, ..., 50
    int chosen_length = 0;            // 0.5/0.5 weighted min-max rule
};

/// Piecewise-constant vaccination-rate search: for each window length a
/// per-sub-interval nu >= 0 is fitted with the integration state carried over
/// from the previous sub-interval's end, then whole-horizon losses are
/// computed. Windows longer than the data are skipped.
WindowSearchResult window_search(const ObservedSeries& obs,
                                 const sir::StringencySeries& stringency, double beta,
                                 double gamma, const FitOptions& opts = {});

} // namespace epictrl::calib

#endif
