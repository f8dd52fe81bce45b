#include "epictrl/sir/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epictrl::sir {

namespace {

bool finite(double v)
{
    return std::isfinite(v);
}

} // namespace

Compartments::Compartments(double s_, double i_, double r_, double n_)
    : s(s_), i(i_), r(r_), n(n_)
{
    if (!finite(s) || !finite(i) || !finite(r) || !finite(n)) {
        throw DomainError("non-finite compartment value");
    }
    if (s < 0 || i < 0 || r < 0 || n <= 0) {
        throw DomainError("negative compartment or non-positive population");
    }
    if (std::abs(s + i + r - n) > 1e-9 * n) {
        throw DomainError("compartments do not sum to the population total");
    }
}

Compartments Compartments::from_counts(double s_, double i_, double r_)
{
    return Compartments(s_, i_, r_, s_ + i_ + r_);
}

SirParams::SirParams(double beta_, double gamma_) : beta(beta_), gamma(gamma_)
{
    if (!finite(beta) || !finite(gamma)) {
        throw DomainError("non-finite rate");
    }
    if (beta < 0 || gamma <= 0) {
        throw DomainError("beta must be >= 0 and gamma > 0");
    }
}

StringencySeries::StringencySeries(Date start, std::vector<double> values)
    : start_(start), values_(std::move(values))
{
    if (values_.empty()) {
        throw DomainError("stringency series must be non-empty");
    }
    for (double v : values_) {
        if (!finite(v) || v < 0.0 || v > 100.0) {
            throw DomainError("stringency value outside [0, 100]");
        }
    }
}

double StringencySeries::at_day(std::size_t day) const
{
    if (day >= values_.size()) {
        throw CoverageError("stringency series does not cover day " + std::to_string(day));
    }
    return values_[day];
}

VaccinationSchedule::VaccinationSchedule(Date start, int window_length,
                                         std::vector<double> rates)
    : start_(start), window_length_(window_length), rates_(std::move(rates))
{
    if (window_length_ < 1) {
        throw DomainError("window length must be >= 1 day");
    }
    if (rates_.empty()) {
        throw DomainError("vaccination schedule must have at least one window");
    }
    for (double r : rates_) {
        if (!finite(r) || r < 0.0) {
            throw DomainError("vaccination rate must be finite and >= 0");
        }
    }
}

double VaccinationSchedule::rate_at_day(std::size_t day) const
{
    std::size_t idx = day / static_cast<std::size_t>(window_length_);
    if (idx >= rates_.size()) {
        idx = rates_.size() - 1; // last window extends to the horizon end
    }
    return rates_[idx];
}

VaccinationSchedule VaccinationSchedule::zero(Date start)
{
    return VaccinationSchedule(start, 1, {0.0});
}

Derivatives derivatives(const Compartments& c, const SirParams& p,
                        std::optional<double> stringency, double nu)
{
    if (!finite(nu) || nu < 0.0) {
        throw DomainError("vaccination rate must be finite and >= 0");
    }
    double lockdown = 1.0;
    if (stringency) {
        if (!finite(*stringency) || *stringency < 0.0 || *stringency > 100.0) {
            throw DomainError("stringency outside [0, 100]");
        }
        lockdown = 1.0 - *stringency / 100.0;
    }
    const double infection = p.beta * lockdown * c.s * c.i / c.n;
    const double recovery = p.gamma * c.i;
    const double vaccination = nu * c.s;
    return Derivatives{-infection - vaccination, infection - recovery,
                       recovery + vaccination};
}

namespace {

struct RawState {
    double s, i, r;
};

RawState rhs(const RawState& x, double n, const SirParams& p, double lockdown, double nu)
{
    const double infection = p.beta * lockdown * x.s * x.i / n;
    const double recovery = p.gamma * x.i;
    const double vaccination = nu * x.s;
    return RawState{-infection - vaccination, infection - recovery,
                    recovery + vaccination};
}

RawState rk4_step(const RawState& x, double n, const SirParams& p, double lockdown,
                  double nu, double dt)
{
    const RawState k1 = rhs(x, n, p, lockdown, nu);
    const RawState x2{x.s + 0.5 * dt * k1.s, x.i + 0.5 * dt * k1.i, x.r + 0.5 * dt * k1.r};
    const RawState k2 = rhs(x2, n, p, lockdown, nu);
    const RawState x3{x.s + 0.5 * dt * k2.s, x.i + 0.5 * dt * k2.i, x.r + 0.5 * dt * k2.r};
    const RawState k3 = rhs(x3, n, p, lockdown, nu);
    const RawState x4{x.s + dt * k3.s, x.i + dt * k3.i, x.r + dt * k3.r};
    const RawState k4 = rhs(x4, n, p, lockdown, nu);
    return RawState{x.s + dt / 6.0 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s),
                    x.i + dt / 6.0 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i),
                    x.r + dt / 6.0 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r)};
}

} // namespace

Trajectory integrate(const Compartments& init, const SirParams& p, std::size_t horizon,
                     const std::optional<StringencySeries>& stringency,
                     const std::optional<VaccinationSchedule>& vax,
                     const IntegrateOptions& opts)
{
    if (stringency && !stringency->covers(horizon > 0 ? horizon - 1 : 0)) {
        throw CoverageError("stringency series shorter than the integration horizon");
    }
    Trajectory traj;
    traj.params_used = p;
    traj.stringency_used = stringency;
    traj.vaccination_used = vax;
    traj.days.reserve(horizon + 1);
    traj.days.push_back(init);

    RawState x{init.s, init.i, init.r};
    const double n = init.n;
    const int sub = std::max(1, opts.steps_per_day);
    const double dt = 1.0 / sub;

    for (std::size_t day = 0; day < horizon; ++day) {
        const double lockdown = stringency ? 1.0 - stringency->at_day(day) / 100.0 : 1.0;
        const double nu = vax ? vax->rate_at_day(day) : 0.0;
        for (int k = 0; k < sub; ++k) {
            x = rk4_step(x, n, p, lockdown, nu, dt);
        }
        if (x.s < 0 || x.i < 0) {
            // Negative-state guard: clamp and push the residual into R.
            x.s = std::max(x.s, 0.0);
            x.i = std::max(x.i, 0.0);
            x.r = n - x.s - x.i;
            ++traj.clamped_steps;
            if (x.r < 0) {
                throw Error("integration produced an unrecoverable negative state");
            }
        }
        traj.days.emplace_back(x.s, x.i, x.r, n);
    }
    return traj;
}

double effective_reproduction(const SirParams& p, double stringency, double s_count,
                              double n)
{
    if (n <= 0.0) {
        throw DomainError("population must be positive");
    }
    if (!std::isfinite(stringency) || stringency < 0.0 || stringency > 100.0) {
        throw DomainError("stringency outside [0, 100]");
    }
    if (s_count < 0.0 || s_count > n) {
        throw DomainError("susceptible count outside [0, n]");
    }
    return p.r0() * (1.0 - stringency / 100.0) * (s_count / n);
}

SeriesStats summarize_series(const std::vector<double>& values)
{
    if (values.empty()) {
        throw DomainError("cannot summarize an empty series");
    }
    SeriesStats st;
    const std::size_t n = values.size();
    st.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    st.min = sorted.front();
    st.max = sorted.back();
    st.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double var = 0.0;
    for (double v : values) {
        var += (v - st.mean) * (v - st.mean);
    }
    st.std = std::sqrt(var / static_cast<double>(n));

    // Histogram mode: midpoint of the most populated of 100 equal bins over
    // the series range; lowest bin wins ties. Degenerate range -> the value.
    if (st.max == st.min) {
        st.mode = st.min;
    } else {
        constexpr int kBins = 100;
        const double width = (st.max - st.min) / kBins;
        int counts[kBins] = {};
        for (double v : values) {
            int b = static_cast<int>((v - st.min) / width);
            b = std::clamp(b, 0, kBins - 1);
            ++counts[b];
        }
        int best = 0;
        for (int b = 1; b < kBins; ++b) {
            if (counts[b] > counts[best]) {
                best = b;
            }
        }
        st.mode = st.min + (best + 0.5) * width;
    }
    return st;
}

SeriesStats r0_summary(const SirParams& p, const StringencySeries& stringency)
{
    std::vector<double> r0(stringency.size());
    for (std::size_t t = 0; t < stringency.size(); ++t) {
        r0[t] = p.r0() * (1.0 - stringency.values()[t] / 100.0);
    }
    return summarize_series(r0);
}

} // namespace epictrl::sir
