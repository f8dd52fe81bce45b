#ifndef EPICTRL_ECON_GDP_HPP
#define EPICTRL_ECON_GDP_HPP

#include <utility>
#include <vector>

#include "epictrl/common/dates.hpp"

namespace epictrl::econ {

/// Cubic stringency -> normalized-GDP model plus its fit statistics.
struct GdpModel {
    double a = 0.0; // s^3 coefficient
    double b = 0.0; // s^2
    double c = 0.0; // s
    double d = 0.0; // intercept
    double r = 0.0;
    double r2 = 0.0;
    double p_value = 1.0;
    std::size_t n_points = 0;
    bool degenerate = false; // constant response, correlation undefined
};

/// Daily normalized-GDP series (index units, long-term trend = 100).
struct DailyGdpSeries {
    Date start_date;
    std::vector<double> values;
};

/// Linear interpolation of quarterly values between quarter-midpoint anchors,
/// flat extrapolation outside, sampled on [range_start, range_end] inclusive.
DailyGdpSeries quarterly_to_daily(const std::vector<std::pair<Quarter, double>>& quarters,
                                  Date range_start, Date range_end);

/// Per-day repetition of each quarter's value instead of interpolation
/// (sensitivity-check alternative).
DailyGdpSeries quarterly_to_daily_repeat(
    const std::vector<std::pair<Quarter, double>>& quarters, Date range_start,
    Date range_end);

/// Least-squares cubic of gdp on stringency; also fills in the Pearson
/// statistics between the two series.
GdpModel fit_cubic(const std::vector<double>& stringency, const std::vector<double>& gdp);

/// a*s^3 + b*s^2 + c*s + d for s in [0, 100].
double predict_gdp(const GdpModel& model, double s);

struct PearsonStats {
    double r = 0.0;
    double r2 = 0.0;
    double p_value = 1.0;
};

/// Pearson correlation with a two-sided Student-t p-value (n-2 dof).
PearsonStats pearson_stats(const std::vector<double>& x, const std::vector<double>& y);

/// (v - lo) / (hi - lo) clipped to [0, 1].
double min_max_normalize(double v, double lo, double hi);
std::vector<double> min_max_normalize(const std::vector<double>& series, double lo,
                                      double hi);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation. Exposed for the statistics tests.
double regularized_incomplete_beta(double a, double b, double x);

} // namespace epictrl::econ

#endif
