#include "epictrl/calib/loss.hpp"

#include <cmath>

#include "epictrl/common/errors.hpp"

namespace epictrl::calib {

ObservedSeries::ObservedSeries(Date start, std::vector<double> s, std::vector<double> i,
                               std::vector<double> r, double n)
    : start_(start), s_(std::move(s)), i_(std::move(i)), r_(std::move(r)), n_(n)
{
    if (n_ <= 0 || !std::isfinite(n_)) {
        throw DomainError("population must be positive and finite");
    }
    if (s_.size() < 2 || s_.size() != i_.size() || s_.size() != r_.size()) {
        throw DomainError("observed series must have equal lengths >= 2");
    }
    for (std::size_t k = 0; k < s_.size(); ++k) {
        for (double v : {s_[k], i_[k], r_[k]}) {
            if (!std::isfinite(v) || v < 0 || v > n_) {
                throw DomainError("observed value outside [0, n] at day " +
                                  std::to_string(k));
            }
        }
    }
}

sir::Compartments ObservedSeries::initial() const
{
    return sir::Compartments(s_[0], i_[0], r_[0], n_);
}

double huber(double y, double f, double delta)
{
    if (!std::isfinite(y) || !std::isfinite(f)) {
        throw DomainError("non-finite input to huber loss");
    }
    if (!(delta > 0)) {
        throw DomainError("huber delta must be positive");
    }
    const double a = std::abs(y - f);
    if (a <= delta) {
        return 0.5 * a * a;
    }
    return delta * (a - 0.5 * delta);
}

namespace {

void check_aligned(const sir::Trajectory& traj, const ObservedSeries& obs)
{
    if (traj.size() != obs.size()) {
        throw AlignmentError("trajectory and observations are not on the same grid (" +
                             std::to_string(traj.size()) + " vs " +
                             std::to_string(obs.size()) + " days)");
    }
}

} // namespace

double loss_sir(const sir::Trajectory& traj, const ObservedSeries& obs)
{
    check_aligned(traj, obs);
    return loss_sir_at(traj, obs, 0);
}

double loss_i(const sir::Trajectory& traj, const ObservedSeries& obs)
{
    check_aligned(traj, obs);
    double total = 0.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
        total += huber(obs.i()[t], traj.days[t].i, 1.0);
    }
    return total;
}

double loss_sir_at(const sir::Trajectory& traj, const ObservedSeries& obs,
                   std::size_t obs_offset)
{
    if (obs_offset + traj.size() > obs.size()) {
        throw AlignmentError("trajectory runs past the end of the observations");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
        const auto& c = traj.days[t];
        const std::size_t d = obs_offset + t;
        total += huber(obs.s()[d], c.s, 1.0);
        total += huber(obs.i()[d], c.i, 1.0);
        total += huber(obs.r()[d], c.r, 1.0);
    }
    return total;
}

} // namespace epictrl::calib
