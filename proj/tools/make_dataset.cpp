// Deterministic generator for the bundled demo dataset.
//
// The epidemic series is produced by the lockdown + time-varying-vaccination
// model itself (plus calibrated observation noise), so the calibration
// pipeline has a known ground truth to recover. The quarterly GDP anchors are
// solved so that the daily interpolated series, regressed on stringency,
// reproduces the reference cubic coefficients exactly.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "epictrl/calib/loss.hpp"
#include "epictrl/econ/gdp.hpp"
#include "epictrl/sir/model.hpp"

using namespace epictrl;
using sir::Compartments;
using sir::SirParams;
using sir::StringencySeries;
using sir::VaccinationSchedule;

namespace {

constexpr int kDays = 915; // inclusive daily grid, 914 transitions
const Date kStart(2020, 5, 1);
constexpr double kPopulation = 1.38e9;
const SirParams kTrueParams(0.316, 0.114);
constexpr double kStringencyMin = 31.48;
constexpr double kStringencyMax = 96.3;
constexpr double kStringencyMeanTarget = 61.96505;
constexpr double kLossITarget = 658537.0;

struct ControlPoint {
    int day;
    double value;
};

std::vector<double> piecewise_linear(const std::vector<ControlPoint>& pts, int days)
{
    std::vector<double> out(static_cast<std::size_t>(days));
    std::size_t seg = 0;
    for (int t = 0; t < days; ++t) {
        while (seg + 1 < pts.size() && pts[seg + 1].day <= t) {
            ++seg;
        }
        if (seg + 1 >= pts.size()) {
            out[static_cast<std::size_t>(t)] = pts.back().value;
            continue;
        }
        const auto& a = pts[seg];
        const auto& b = pts[seg + 1];
        const double w = static_cast<double>(t - a.day) / (b.day - a.day);
        out[static_cast<std::size_t>(t)] = (1.0 - w) * a.value + w * b.value;
    }
    return out;
}

double round2(double v)
{
    return std::round(v * 100.0) / 100.0;
}

/// Step-like wiggle: the index changes every few days, like a composite
/// policy indicator, not every day.
std::vector<double> add_policy_wiggle(const std::vector<double>& base, double amplitude,
                                      std::uint64_t seed, double lo, double hi)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> amp(0.0, amplitude);
    std::uniform_int_distribution<int> hold(3, 8);
    std::vector<double> out(base.size());
    double w = 0.0;
    int until = 0;
    for (std::size_t t = 0; t < base.size(); ++t) {
        if (static_cast<int>(t) >= until) {
            w = amp(rng);
            until = static_cast<int>(t) + hold(rng);
        }
        out[t] = round2(std::clamp(base[t] + w, lo, hi));
    }
    return out;
}

std::vector<double> make_india_stringency()
{
    // Oscillation around the series mean, which sits near the epidemic's
    // critical stringency, so infections wander in bounded waves.
    const std::vector<ControlPoint> pts = {
        {0, 78.0},   {12, 96.0},  {30, 82.0},  {55, 62.0},  {80, 50.0},
        {130, 49.0}, {160, 58.0}, {185, 70.0}, {240, 77.0}, {265, 70.0},
        {290, 56.0}, {330, 48.0}, {370, 52.0}, {400, 64.0}, {440, 76.0},
        {480, 74.0}, {510, 62.0}, {545, 50.0}, {580, 47.0}, {600, 34.0},
        {615, 50.0}, {645, 62.0}, {680, 72.0}, {720, 76.0}, {760, 66.0},
        {800, 56.0}, {840, 60.0}, {875, 68.0}, {914, 72.0}};
    auto base = piecewise_linear(pts, kDays);
    // Interior values stay strictly inside the pinned extremes.
    auto s = add_policy_wiggle(base, 0.9, 101, kStringencyMin + 0.02,
                               kStringencyMax - 0.02);

    // Nudge the back half (away from both pinned extremes) until the series
    // mean lands on the target.
    for (int pass = 0; pass < 8; ++pass) {
        double mean = 0.0;
        for (double v : s) {
            mean += v;
        }
        mean /= kDays;
        const double deficit = kStringencyMeanTarget - mean;
        if (std::abs(deficit) < 0.002) {
            break;
        }
        const double shift = deficit * kDays / (kDays - 400);
        for (std::size_t t = 400; t < s.size(); ++t) {
            s[t] = round2(std::clamp(s[t] + shift, kStringencyMin + 0.02,
                                     kStringencyMax - 0.02));
        }
    }

    s[12] = kStringencyMax;  // pinned maximum (strictest early lockdown)
    s[600] = kStringencyMin; // pinned minimum (deepest brief re-opening)
    return s;
}

std::vector<double> make_mexico_stringency()
{
    const std::vector<ControlPoint> pts = {{0, 82.0},   {60, 75.0},  {150, 62.0},
                                           {260, 70.0}, {380, 55.0}, {500, 60.0},
                                           {650, 45.0}, {800, 38.0}, {914, 35.0}};
    return add_policy_wiggle(piecewise_linear(pts, kDays), 1.2, 202, 30.0, 90.0);
}

std::vector<double> make_brazil_stringency()
{
    const std::vector<ControlPoint> pts = {{0, 78.0},   {90, 68.0},  {200, 74.0},
                                           {320, 60.0}, {450, 66.0}, {600, 50.0},
                                           {750, 42.0}, {914, 37.0}};
    return add_policy_wiggle(piecewise_linear(pts, kDays), 1.2, 203, 30.0, 90.0);
}

VaccinationSchedule make_vaccination_schedule()
{
    // 15-day windows covering 914 transitions; rollout starts around day 260
    // and ramps to a plateau.
    std::vector<double> rates;
    for (int start = 0; start < kDays - 1; start += 15) {
        double rate = 0.0;
        if (start >= 255 && start < 500) {
            rate = 1e-4 * static_cast<double>(start - 255) / 245.0;
        } else if (start >= 500 && start < 650) {
            rate = 1e-4;
        } else if (start >= 650) {
            rate = std::max(3e-5, 1e-4 - 7e-5 * (start - 650) / 264.0);
        }
        rates.push_back(rate);
    }
    return VaccinationSchedule(kStart, 15, rates);
}

std::vector<Quarter> dataset_quarters()
{
    std::vector<Quarter> q;
    for (int year = 2020; year <= 2022; ++year) {
        for (int k = 1; k <= 4; ++k) {
            if (year == 2020 && k == 1) {
                continue;
            }
            q.push_back(Quarter{year, k});
        }
    }
    return q; // 2020-Q2 .. 2022-Q4
}

double reference_cubic(double s)
{
    return ((-5.96640236e-5 * s + 6.65064332e-3) * s - 2.23109924e-1) * s +
           1.01357226e2;
}

/// Quarterly anchors whose interpolated daily series has exactly the same
/// least-squares cubic (against the given stringency) as reference_cubic.
std::vector<double> solve_gdp_quarters(const std::vector<double>& stringency,
                                       const std::vector<Quarter>& quarters)
{
    const std::size_t nq = quarters.size();
    const Date end = kStart + (kDays - 1);

    // Interpolation operator P: daily value = P * quarterly anchors.
    std::vector<int> anchor(nq);
    for (std::size_t k = 0; k < nq; ++k) {
        anchor[k] = quarters[k].midpoint() - kStart;
    }
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(kDays, static_cast<Eigen::Index>(nq));
    for (int t = 0; t < kDays; ++t) {
        if (t <= anchor.front()) {
            P(t, 0) = 1.0;
        } else if (t >= anchor.back()) {
            P(t, static_cast<Eigen::Index>(nq) - 1) = 1.0;
        } else {
            std::size_t k = 0;
            while (anchor[k + 1] < t) {
                ++k;
            }
            const double w = static_cast<double>(t - anchor[k]) /
                             static_cast<double>(anchor[k + 1] - anchor[k]);
            P(t, static_cast<Eigen::Index>(k)) = 1.0 - w;
            P(t, static_cast<Eigen::Index>(k + 1)) = w;
        }
    }

    // Scaled cubic design matrix and the exact-cubic daily target.
    const auto [lo_it, hi_it] = std::minmax_element(stringency.begin(), stringency.end());
    const double lo = *lo_it, w = *hi_it - lo;
    Eigen::MatrixXd X(kDays, 4);
    Eigen::VectorXd target(kDays);
    for (int t = 0; t < kDays; ++t) {
        const double u = (stringency[static_cast<std::size_t>(t)] - lo) / w;
        X(t, 0) = 1.0;
        X(t, 1) = u;
        X(t, 2) = u * u;
        X(t, 3) = u * u * u;
        target(t) = reference_cubic(stringency[static_cast<std::size_t>(t)]);
    }

    // Plausible starting anchors: the cubic evaluated at each quarter's mean
    // stringency.
    Eigen::VectorXd q0(static_cast<Eigen::Index>(nq));
    for (std::size_t k = 0; k < nq; ++k) {
        double sum = 0.0;
        int count = 0;
        for (Date d = std::max(quarters[k].first_day(), kStart);
             d <= std::min(quarters[k].last_day(), end); d = d + 1) {
            sum += stringency[static_cast<std::size_t>(d - kStart)];
            ++count;
        }
        q0(static_cast<Eigen::Index>(k)) = reference_cubic(sum / count);
    }

    // Minimal correction of q0 subject to X' P q = X' target, which forces the
    // daily fit through the reference coefficients.
    const Eigen::MatrixXd A = X.transpose() * P; // 4 x nq
    const Eigen::VectorXd b = X.transpose() * target;
    const Eigen::VectorXd residual = b - A * q0;
    const Eigen::VectorXd q =
        q0 + A.transpose() * (A * A.transpose()).ldlt().solve(residual);
    return {q.data(), q.data() + q.size()};
}

std::vector<double> noisy_gdp_quarters(const std::vector<double>& stringency,
                                       const std::vector<Quarter>& quarters,
                                       std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.35);
    const Date end = kStart + (kDays - 1);
    std::vector<double> out;
    for (const auto& quarter : quarters) {
        double sum = 0.0;
        int count = 0;
        for (Date d = std::max(quarter.first_day(), kStart);
             d <= std::min(quarter.last_day(), end); d = d + 1) {
            sum += stringency[static_cast<std::size_t>(d - kStart)];
            ++count;
        }
        out.push_back(reference_cubic(sum / count) + noise(rng));
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    const std::string out_dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(out_dir);

    // --- stringency -------------------------------------------------------
    const auto india = make_india_stringency();
    const auto mexico = make_mexico_stringency();
    const auto brazil = make_brazil_stringency();

    double mean = 0.0, mn = 1e9, mx = -1e9;
    for (double v : india) {
        mean += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    mean /= kDays;
    std::printf("stringency IND: n=%d min=%.2f max=%.2f mean=%.5f\n", kDays, mn, mx,
                mean);

    // --- epidemic series --------------------------------------------------
    const StringencySeries stringency(kStart, india);
    const auto vax = make_vaccination_schedule();
    const double i0 = 600000.0, r0 = 150000.0;
    const Compartments init(kPopulation - i0 - r0, i0, r0, kPopulation);
    const auto traj = sir::integrate(init, kTrueParams, kDays - 1, stringency, vax);
    const auto fine = sir::integrate(init, kTrueParams, kDays - 1, stringency, vax,
                                     sir::IntegrateOptions{64});

    double peak = 0.0;
    int peak_day = 0, days_over = 0;
    for (int t = 0; t < kDays; ++t) {
        const double ip = traj.days[static_cast<std::size_t>(t)].i / kPopulation;
        if (ip > peak) {
            peak = ip;
            peak_day = t;
        }
        if (ip > 0.003) {
            ++days_over;
        }
    }
    std::printf("epidemic: peak i_prop=%.5f at day %d, days over 0.003: %d\n", peak,
                peak_day, days_over);
    double min_i = 1e18;
    for (const auto& c : traj.days) {
        min_i = std::min(min_i, c.i);
    }
    std::printf("epidemic: min I=%.0f; S/N at d255=%.3f d450=%.3f d650=%.3f d914=%.3f\n",
                min_i, traj.days[255].s / kPopulation, traj.days[450].s / kPopulation,
                traj.days[650].s / kPopulation, traj.days[914].s / kPopulation);
    if (argc > 2) { // verbose trace for tuning
        for (int t = 0; t < kDays; t += 30) {
            const auto& c = traj.days[static_cast<std::size_t>(t)];
            std::printf("  d%3d s=%5.1f i_prop=%.5f S/N=%.3f\n", t,
                        india[static_cast<std::size_t>(t)], c.i / kPopulation,
                        c.s / kPopulation);
        }
    }
    std::printf("epidemic: final i=%.0f (coarse) vs %.0f (fine), clamped=%zu\n",
                traj.days.back().i, fine.days.back().i, traj.clamped_steps);

    // --- observation noise, calibrated to the target fit residual ---------
    std::mt19937_64 rng(301);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> eps_i(kDays), eps_r(kDays);
    double abs_sum = 0.0;
    for (int t = 0; t < kDays; ++t) {
        eps_i[static_cast<std::size_t>(t)] = unit(rng);
        eps_r[static_cast<std::size_t>(t)] = unit(rng);
        abs_sum += std::abs(eps_i[static_cast<std::size_t>(t)]);
    }
    // Huber(1) of a large residual is |e| - 0.5, so scale the draws to meet
    // the target total.
    const double sigma_i = (kLossITarget + 0.5 * kDays) / abs_sum;
    const double sigma_r = 1.6 * sigma_i;

    std::vector<double> obs_i(kDays), obs_r(kDays);
    for (int t = 0; t < kDays; ++t) {
        const auto& c = traj.days[static_cast<std::size_t>(t)];
        double iv = std::round(c.i + sigma_i * eps_i[static_cast<std::size_t>(t)]);
        double rv = std::round(c.r + sigma_r * eps_r[static_cast<std::size_t>(t)]);
        iv = std::clamp(iv, 0.0, kPopulation);
        rv = std::clamp(rv, 0.0, kPopulation - iv);
        obs_i[static_cast<std::size_t>(t)] = iv;
        obs_r[static_cast<std::size_t>(t)] = rv;
    }

    {
        std::vector<double> obs_s(kDays);
        for (int t = 0; t < kDays; ++t) {
            obs_s[static_cast<std::size_t>(t)] =
                kPopulation - obs_i[static_cast<std::size_t>(t)] -
                obs_r[static_cast<std::size_t>(t)];
        }
        const calib::ObservedSeries obs(kStart, obs_s, obs_i, obs_r, kPopulation);
        std::printf("noise: sigma_i=%.1f, loss_i(truth)=%.0f, loss_sir(truth)=%.0f\n",
                    sigma_i, calib::loss_i(traj, obs), calib::loss_sir(traj, obs));
    }

    // --- GDP --------------------------------------------------------------
    const auto quarters = dataset_quarters();
    const auto gdp_ind = solve_gdp_quarters(india, quarters);
    const auto gdp_mex = noisy_gdp_quarters(mexico, quarters, 401);
    const auto gdp_bra = noisy_gdp_quarters(brazil, quarters, 402);
    {
        std::vector<std::pair<Quarter, double>> qv;
        for (std::size_t k = 0; k < quarters.size(); ++k) {
            qv.emplace_back(quarters[k], gdp_ind[k]);
        }
        const auto daily = econ::quarterly_to_daily(qv, kStart, kStart + (kDays - 1));
        const auto model = econ::fit_cubic(india, daily.values);
        std::printf("gdp IND anchors:");
        for (double v : gdp_ind) {
            std::printf(" %.3f", v);
        }
        std::printf("\ngdp fit: a=%.8e b=%.8e c=%.8e d=%.8f r=%.4f p=%.3e\n", model.a,
                    model.b, model.c, model.d, model.r, model.p_value);
    }

    // --- files ------------------------------------------------------------
    const auto path = [&](const std::string& name) { return out_dir + "/" + name; };

    {
        std::ofstream out(path("owid_stringency.csv"));
        out << "iso_code,location,date,stringency_index\n";
        const auto write_country = [&](const char* iso, const char* name,
                                       const std::vector<double>& v) {
            char buf[32];
            for (int t = 0; t < kDays; ++t) {
                std::snprintf(buf, sizeof buf, "%.2f", v[static_cast<std::size_t>(t)]);
                out << iso << ',' << name << ',' << (kStart + t).to_string() << ','
                    << buf << '\n';
            }
        };
        write_country("IND", "India", india);
        write_country("MEX", "Mexico", mexico);
        write_country("BRA", "Brazil", brazil);
    }

    {
        std::ofstream out(path("worldometer_cases.csv"));
        out << "date,total_cases,recovered\n";
        for (int t = 0; t < kDays; ++t) {
            const double iv = obs_i[static_cast<std::size_t>(t)];
            const double rv = obs_r[static_cast<std::size_t>(t)];
            out << (kStart + t).to_string() << ',' << std::llround(iv + rv) << ','
                << std::llround(rv) << '\n';
        }
    }

    {
        std::ofstream out(path("oecd_gdp.csv"));
        out << "LOCATION,TIME,Value\n";
        char buf[32];
        const auto write_country = [&](const char* iso, const std::vector<double>& v) {
            for (std::size_t k = 0; k < quarters.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%.6f", v[k]);
                out << iso << ',' << quarters[k].to_string() << ',' << buf << '\n';
            }
        };
        write_country("IND", gdp_ind);
        write_country("MEX", gdp_mex);
        write_country("BRA", gdp_bra);
    }

    {
        std::ofstream out(path("reference_trajectory.csv"));
        out << "date,susceptible,infected,recovered\n";
        char buf[96];
        for (int t = 0; t < kDays; ++t) {
            const auto& c = traj.days[static_cast<std::size_t>(t)];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", c.s, c.i, c.r);
            out << (kStart + t).to_string() << ',' << buf << '\n';
        }
    }

    {
        std::ofstream out(path("generation_notes.json"));
        out << "{\n"
            << "  \"beta\": " << kTrueParams.beta << ",\n"
            << "  \"gamma\": " << kTrueParams.gamma << ",\n"
            << "  \"population\": " << kPopulation << ",\n"
            << "  \"initial_infected\": " << i0 << ",\n"
            << "  \"initial_recovered\": " << r0 << ",\n"
            << "  \"vaccination_window\": 15,\n"
            << "  \"days\": " << kDays << ",\n"
            << "  \"start_date\": \"" << kStart.to_string() << "\"\n"
            << "}\n";
    }

    std::cout << "wrote dataset to " << out_dir << "\n";
    return 0;
}
