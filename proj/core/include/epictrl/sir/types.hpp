#ifndef EPICTRL_SIR_TYPES_HPP
#define EPICTRL_SIR_TYPES_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "epictrl/common/dates.hpp"
#include "epictrl/common/errors.hpp"

namespace epictrl::sir {

/// Susceptible / infected / recovered person counts at one instant.
/// Construction checks s + i + r == n to within 1e-9 relative.
struct Compartments {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    double n = 0.0;

    Compartments() = default;
    Compartments(double s_, double i_, double r_, double n_);

    /// Builds with n = s + i + r.
    static Compartments from_counts(double s_, double i_, double r_);

    double s_prop() const { return s / n; }
    double i_prop() const { return i / n; }
    double r_prop() const { return r / n; }
};

/// Transmission and recovery rates, per day.
struct SirParams {
    double beta = 0.0;  // >= 0
    double gamma = 0.0; // > 0

    SirParams() = default;
    SirParams(double beta_, double gamma_);

    double r0() const { return beta / gamma; }
};

/// Daily lockdown-stringency values in [0, 100] on a contiguous grid.
class StringencySeries {
public:
    StringencySeries(Date start, std::vector<double> values);

    Date start_date() const { return start_; }
    std::size_t size() const { return values_.size(); }
    double at_day(std::size_t day) const; // throws CoverageError past the end
    const std::vector<double>& values() const { return values_; }

    /// True if the series has a value for every day 0..horizon (inclusive grid
    /// of horizon transitions needs indices 0..horizon-1; we require horizon+1
    /// entries so day-horizon state metadata is also covered).
    bool covers(std::size_t horizon) const { return values_.size() >= horizon + 1; }

private:
    Date start_;
    std::vector<double> values_;
};

/// Piecewise-constant vaccination rate: rates[k] applies to days
/// [k*window_length, (k+1)*window_length); the last window extends to the
/// horizon end.
class VaccinationSchedule {
public:
    VaccinationSchedule(Date start, int window_length, std::vector<double> rates);

    Date start_date() const { return start_; }
    int window_length() const { return window_length_; }
    const std::vector<double>& rates() const { return rates_; }
    double rate_at_day(std::size_t day) const;

    /// Schedule that is identically zero.
    static VaccinationSchedule zero(Date start);

private:
    Date start_;
    int window_length_ = 1;
    std::vector<double> rates_;
};

/// Integrated model solution on the daily grid, plus the inputs that produced it.
struct Trajectory {
    std::vector<Compartments> days; // index = day offset from start
    SirParams params_used;
    std::optional<StringencySeries> stringency_used;
    std::optional<VaccinationSchedule> vaccination_used;
    std::size_t clamped_steps = 0; // steps where the negative-state guard fired

    std::size_t size() const { return days.size(); }
};

} // namespace epictrl::sir

#endif
