#include "epictrl/econ/gdp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "epictrl/common/errors.hpp"

namespace epictrl::econ {

namespace {

double lbeta(double a, double b)
{
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued-fraction kernel for the incomplete beta function (modified
// Lentz iteration).
double beta_cf(double a, double b, double x)
{
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

bool is_constant(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x)
{
    if (a <= 0 || b <= 0) {
        throw DomainError("incomplete beta parameters must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

DailyGdpSeries quarterly_to_daily(const std::vector<std::pair<Quarter, double>>& quarters,
                                  Date range_start, Date range_end)
{
    if (quarters.size() < 2) {
        throw DomainError("need at least two quarters to interpolate");
    }
    for (std::size_t k = 1; k < quarters.size(); ++k) {
        if (!(quarters[k - 1].first < quarters[k].first)) {
            throw DomainError("quarters must be strictly chronological");
        }
    }
    if (range_end < range_start) {
        throw DomainError("empty daily range");
    }

    std::vector<int> anchor_days;
    for (const auto& [q, v] : quarters) {
        anchor_days.push_back(q.midpoint() - range_start);
        (void)v;
    }

    DailyGdpSeries out;
    out.start_date = range_start;
    const int days = range_end - range_start;
    out.values.reserve(static_cast<std::size_t>(days) + 1);
    for (int t = 0; t <= days; ++t) {
        if (t <= anchor_days.front()) {
            out.values.push_back(quarters.front().second);
        } else if (t >= anchor_days.back()) {
            out.values.push_back(quarters.back().second);
        } else {
            std::size_t k = 0;
            while (anchor_days[k + 1] < t) ++k;
            const double w = static_cast<double>(t - anchor_days[k]) /
                             static_cast<double>(anchor_days[k + 1] - anchor_days[k]);
            out.values.push_back((1.0 - w) * quarters[k].second +
                                 w * quarters[k + 1].second);
        }
    }
    return out;
}

DailyGdpSeries quarterly_to_daily_repeat(
    const std::vector<std::pair<Quarter, double>>& quarters, Date range_start,
    Date range_end)
{
    if (quarters.empty()) {
        throw DomainError("no quarterly values");
    }
    DailyGdpSeries out;
    out.start_date = range_start;
    const int days = range_end - range_start;
    for (int t = 0; t <= days; ++t) {
        const Date day = range_start + t;
        double value = quarters.front().second;
        for (const auto& [q, v] : quarters) {
            if (q.first_day() <= day) {
                value = v;
            }
        }
        out.values.push_back(value);
    }
    return out;
}

PearsonStats pearson_stats(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) {
        throw DomainError("pearson_stats needs equal lengths >= 3");
    }
    if (is_constant(x) || is_constant(y)) {
        throw DomainError("pearson correlation undefined for a constant series");
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    PearsonStats st;
    st.r = sxy / std::sqrt(sxx * syy);
    st.r = std::clamp(st.r, -1.0, 1.0);
    st.r2 = st.r * st.r;
    const double dof = static_cast<double>(n - 2);
    if (st.r2 >= 1.0) {
        st.p_value = 0.0;
    } else {
        const double t = st.r * std::sqrt(dof / (1.0 - st.r2));
        st.p_value = regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
    }
    return st;
}

GdpModel fit_cubic(const std::vector<double>& stringency, const std::vector<double>& gdp)
{
    const std::size_t n = stringency.size();
    if (n < 4 || gdp.size() != n) {
        throw DomainError("fit_cubic needs equal lengths >= 4");
    }
    const auto [lo_it, hi_it] = std::minmax_element(stringency.begin(), stringency.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        throw FitError("rank-deficient design: stringency is constant");
    }

    GdpModel model;
    model.n_points = n;

    if (is_constant(gdp)) {
        double mean = 0;
        for (double v : gdp) mean += v;
        model.d = mean / static_cast<double>(n);
        model.degenerate = true;
        model.r = 0.0;
        model.r2 = 0.0;
        model.p_value = 1.0;
        return model;
    }

    // Normal equations on stringency rescaled to [0, 1] for conditioning.
    const double w = hi - lo;
    Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
    Eigen::Vector4d atb = Eigen::Vector4d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (stringency[k] - lo) / w;
        Eigen::Vector4d row(1.0, u, u * u, u * u * u);
        ata += row * row.transpose();
        atb += row * gdp[k];
    }
    const Eigen::Vector4d q = ata.ldlt().solve(atb);

    // Expand q0 + q1*u + q2*u^2 + q3*u^3 with u = (s - lo)/w back to powers of s.
    const double alpha = 1.0 / w;
    const double beta0 = -lo / w;
    double coeff[4] = {0, 0, 0, 0}; // coeff[k] multiplies s^k
    double pow_poly[4] = {1, 0, 0, 0}; // (alpha*s + beta0)^j, updated per j
    for (int j = 0; j <= 3; ++j) {
        if (j > 0) {
            double next[4] = {0, 0, 0, 0};
            for (int m = 0; m < j; ++m) {
                next[m] += pow_poly[m] * beta0;
                next[m + 1] += pow_poly[m] * alpha;
            }
            std::copy(next, next + 4, pow_poly);
        }
        for (int m = 0; m <= j; ++m) {
            coeff[m] += q[j] * pow_poly[m];
        }
    }
    model.d = coeff[0];
    model.c = coeff[1];
    model.b = coeff[2];
    model.a = coeff[3];

    const PearsonStats st = pearson_stats(stringency, gdp);
    model.r = st.r;
    model.r2 = st.r2;
    model.p_value = st.p_value;
    return model;
}

double predict_gdp(const GdpModel& model, double s)
{
    if (!std::isfinite(s) || s < 0.0 || s > 100.0) {
        throw DomainError("stringency outside [0, 100]");
    }
    return ((model.a * s + model.b) * s + model.c) * s + model.d;
}

double min_max_normalize(double v, double lo, double hi)
{
    if (!(hi > lo)) {
        throw DomainError("min_max_normalize needs hi > lo");
    }
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<double> min_max_normalize(const std::vector<double>& series, double lo,
                                      double hi)
{
    std::vector<double> out;
    out.reserve(series.size());
    for (double v : series) {
        out.push_back(min_max_normalize(v, lo, hi));
    }
    return out;
}

} // namespace epictrl::econ
