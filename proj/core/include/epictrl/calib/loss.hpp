#ifndef EPICTRL_CALIB_LOSS_HPP
#define EPICTRL_CALIB_LOSS_HPP

#include <vector>

#include "epictrl/common/dates.hpp"
#include "epictrl/sir/types.hpp"

namespace epictrl::calib {

/// Daily observed compartment counts the models are calibrated against.
class ObservedSeries {
public:
    ObservedSeries(Date start, std::vector<double> s, std::vector<double> i,
                   std::vector<double> r, double n);

    Date start_date() const { return start_; }
    std::size_t size() const { return s_.size(); }
    double n() const { return n_; }
    const std::vector<double>& s() const { return s_; }
    const std::vector<double>& i() const { return i_; }
    const std::vector<double>& r() const { return r_; }

    sir::Compartments initial() const;

private:
    Date start_;
    std::vector<double> s_, i_, r_;
    double n_ = 0.0;
};

/// Huber loss: quadratic inside delta, linear outside.
double huber(double y, double f, double delta);

/// Sum over all days of Huber(delta=1) terms for S, I and R.
double loss_sir(const sir::Trajectory& traj, const ObservedSeries& obs);

/// Same but only the infected compartment.
double loss_i(const sir::Trajectory& traj, const ObservedSeries& obs);

/// Sub-interval loss used by the window search: traj[k] is compared against
/// obs[obs_offset + k] for every trajectory entry.
double loss_sir_at(const sir::Trajectory& traj, const ObservedSeries& obs,
                   std::size_t obs_offset);

} // namespace epictrl::calib

#endif
