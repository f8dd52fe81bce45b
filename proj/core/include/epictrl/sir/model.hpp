#ifndef EPICTRL_SIR_MODEL_HPP
#define EPICTRL_SIR_MODEL_HPP

#include <optional>

#include "epictrl/sir/types.hpp"

namespace epictrl::sir {

struct Derivatives {
    double ds = 0.0;
    double di = 0.0;
    double dr = 0.0;
};

/// Right-hand side of the compartmental model. With stringency absent and
/// nu = 0 this reduces to the plain SIR flow; the transmission term carries
/// the lockdown factor (1 - stringency/100) and -nu*S moves susceptibles
/// straight to recovered.
Derivatives derivatives(const Compartments& c, const SirParams& p,
                        std::optional<double> stringency, double nu);

struct IntegrateOptions {
    /// RK4 substeps per day. 1 is the production setting; larger values are
    /// used by tests as an independent fine-step oracle.
    int steps_per_day = 1;
};

/// Integrates the model forward over `horizon` daily transitions with
/// classical RK4, stringency and nu held constant within each day. The
/// result has horizon+1 entries and entry 0 equals `init`.
Trajectory integrate(const Compartments& init, const SirParams& p, std::size_t horizon,
                     const std::optional<StringencySeries>& stringency = std::nullopt,
                     const std::optional<VaccinationSchedule>& vax = std::nullopt,
                     const IntegrateOptions& opts = {});

/// (beta/gamma) * (1 - stringency/100) * (s_count / n).
double effective_reproduction(const SirParams& p, double stringency, double s_count,
                              double n);

struct SeriesStats {
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Summary statistics of the daily series (beta/gamma)*(1 - s(t)/100).
/// Mode is the midpoint of the most populated bin of a 100-bin histogram
/// over the series range (lowest bin wins ties).
SeriesStats r0_summary(const SirParams& p, const StringencySeries& stringency);

/// Statistics of an arbitrary value series, same mode convention.
SeriesStats summarize_series(const std::vector<double>& values);

} // namespace epictrl::sir

#endif
