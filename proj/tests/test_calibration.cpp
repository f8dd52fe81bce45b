#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "epictrl/calib/fit.hpp"
#include "test_support.hpp"

using namespace epictrl;
using namespace epictrl::calib;
using epictrl::sir::Compartments;
using epictrl::sir::SirParams;
using epictrl::sir::StringencySeries;
using epictrl::sir::VaccinationSchedule;
using test_support::random_stringency;
using test_support::synthesize_observations;

TEST_CASE("huber point values")
{
    CHECK(huber(5.0, 5.0, 1.0) == 0.0);
    CHECK(huber(1.0, 0.5, 1.0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(huber(4.0, 1.0, 1.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK_THROWS_AS(huber(1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(huber(std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0),
                    DomainError);
}

TEST_CASE("huber symmetry, monotonicity and branch formulas")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    double prev = -1.0;
    for (int k = 0; k < 200; ++k) {
        const double y = u(rng), f = u(rng), delta = ud(rng);
        CHECK(huber(y, f, delta) == huber(f, y, delta));
        const double e = std::abs(y - f);
        const double expect =
            e <= delta ? 0.5 * e * e : delta * (e - 0.5 * delta);
        CHECK(huber(y, f, delta) == doctest::Approx(expect).epsilon(1e-13));
    }
    // Monotone non-decreasing in |y - f| at fixed delta.
    for (double e = 0.0; e <= 5.0; e += 0.05) {
        const double v = huber(e, 0.0, 1.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("losses vanish on a perfect match and count a single I offset once")
{
    const Compartments init(9e5, 1e3, 99e3, 1e6);
    const auto traj = sir::integrate(init, SirParams(0.3, 0.1), 30);
    std::vector<double> s, i, r;
    for (const auto& c : traj.days) {
        s.push_back(c.s);
        i.push_back(c.i);
        r.push_back(c.r);
    }
    const ObservedSeries exact(Date(2020, 5, 1), s, i, r, 1e6);
    CHECK(loss_sir(traj, exact) == 0.0);
    CHECK(loss_i(traj, exact) == 0.0);

    auto i_off = i;
    i_off[10] += 0.5;
    const ObservedSeries off(Date(2020, 5, 1), s, i_off, r, 1e6);
    CHECK(loss_i(traj, off) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(loss_sir(traj, off) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(loss_i(traj, off) <= loss_sir(traj, off));
}

TEST_CASE("losses require aligned grids")
{
    const Compartments init(9e5, 1e3, 99e3, 1e6);
    const auto traj = sir::integrate(init, SirParams(0.3, 0.1), 30);
    const ObservedSeries shorter(Date(2020, 5, 1), std::vector<double>(10, 9e5),
                                 std::vector<double>(10, 1e3),
                                 std::vector<double>(10, 99e3), 1e6);
    CHECK_THROWS_AS(loss_sir(traj, shorter), AlignmentError);
    CHECK_THROWS_AS(loss_i(traj, shorter), AlignmentError);
}

TEST_CASE("simplex minimizer solves a convex parabola")
{
    const auto res = nelder_mead(
        [](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0); }, {0.0});
    CHECK(res.converged);
    CHECK(std::abs(res.argmin[0] - 3.0) < 1e-4);
    CHECK(res.value <= 9.0);
}

namespace {

double rosenbrock(const std::vector<double>& x)
{
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

// Coarse-to-fine grid refinement: an independent locator for the minimum.
std::pair<double, double> grid_refine_rosenbrock()
{
    double cx = 0.0, cy = 0.0, half = 2.5;
    for (int level = 0; level < 12; ++level) {
        double best = std::numeric_limits<double>::infinity();
        double bx = cx, by = cy;
        for (int ix = -10; ix <= 10; ++ix) {
            for (int iy = -10; iy <= 10; ++iy) {
                const double x = cx + half * ix / 10.0;
                const double y = cy + half * iy / 10.0;
                const double v = rosenbrock({x, y});
                if (v < best) {
                    best = v;
                    bx = x;
                    by = y;
                }
            }
        }
        cx = bx;
        cy = by;
        half /= 5.0;
    }
    return {cx, cy};
}

} // namespace

TEST_CASE("simplex minimizer matches a grid-refinement oracle on the banana valley")
{
    const auto [ox, oy] = grid_refine_rosenbrock();
    CHECK(std::abs(ox - 1.0) < 1e-6);
    CHECK(std::abs(oy - 1.0) < 1e-6);
    const auto res = nelder_mead(rosenbrock, {-1.2, 1.0});
    CHECK(std::abs(res.argmin[0] - ox) < 1e-3);
    CHECK(std::abs(res.argmin[1] - oy) < 1e-3);
}

TEST_CASE("simplex minimizer edge cases")
{
    const auto flat = nelder_mead([](const std::vector<double>&) { return 7.0; },
                                  {1.0, 2.0});
    CHECK(flat.converged);
    CHECK(flat.argmin == std::vector<double>{1.0, 2.0});
    CHECK(flat.value == 7.0);

    CHECK_THROWS_AS(nelder_mead(
                        [](const std::vector<double>&) {
                            return std::numeric_limits<double>::quiet_NaN();
                        },
                        {0.0}),
                    FitError);

    // +inf used as a constraint penalty away from the seed is fine.
    const auto boxed = nelder_mead(
        [](const std::vector<double>& x) {
            if (x[0] < 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            return (x[0] - 0.2) * (x[0] - 0.2);
        },
        {1.0});
    CHECK(std::abs(boxed.argmin[0] - 0.2) < 1e-4);
}

TEST_CASE("plain-model fit recovers the generating parameters")
{
    const Compartments init(1e6 - 2e3, 2e3, 0.0, 1e6);
    const auto obs = synthesize_observations(init, SirParams(0.3, 0.1), 150);
    const auto fit = fit_simple_sir(obs);
    CHECK(fit.converged);
    CHECK(fit.params.beta == doctest::Approx(0.3).epsilon(0.05));
    CHECK(fit.params.gamma == doctest::Approx(0.1).epsilon(0.05));
    CHECK(fit.loss_i <= fit.loss_sir);
}

TEST_CASE("plain-model fit flags the degenerate no-infection series")
{
    const ObservedSeries obs(Date(2020, 5, 1), std::vector<double>(40, 1e6),
                             std::vector<double>(40, 0.0),
                             std::vector<double>(40, 0.0), 1e6);
    const auto fit = fit_simple_sir(obs);
    CHECK_FALSE(fit.converged);
}

TEST_CASE("lockdown fit recovers parameters under a varying stringency series")
{
    const auto stringency = random_stringency(151, 20.0, 80.0, 21);
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs =
        synthesize_observations(init, SirParams(0.4, 0.09), 150, stringency);
    const auto fit = fit_lockdown_sir(obs, stringency);
    CHECK(fit.params.beta == doctest::Approx(0.4).epsilon(0.05));
    CHECK(fit.params.gamma == doctest::Approx(0.09).epsilon(0.05));
}

TEST_CASE("zero stringency reduces the lockdown fit to the plain fit")
{
    const Compartments init(1e6 - 2e3, 2e3, 0.0, 1e6);
    const auto obs = synthesize_observations(init, SirParams(0.3, 0.1), 120);
    const StringencySeries zeros(Date(2020, 5, 1), std::vector<double>(121, 0.0));
    const auto plain = fit_simple_sir(obs);
    const auto locked = fit_lockdown_sir(obs, zeros);
    CHECK(locked.params.beta == doctest::Approx(plain.params.beta).epsilon(1e-3));
    CHECK(locked.params.gamma == doctest::Approx(plain.params.gamma).epsilon(1e-3));
    CHECK(locked.loss_sir == doctest::Approx(plain.loss_sir).epsilon(1e-6));
}

TEST_CASE("constant-vaccination fit keeps nu near zero when none was used")
{
    const auto stringency = random_stringency(121, 20.0, 70.0, 31);
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs =
        synthesize_observations(init, SirParams(0.4, 0.1), 120, stringency);
    const auto fit = fit_lockdown_vax_sir(obs, stringency);
    REQUIRE(fit.nu.has_value());
    CHECK(*fit.nu <= 1e-6);
}

TEST_CASE("constant-vaccination fit recovers a real rate")
{
    const auto stringency = random_stringency(151, 20.0, 70.0, 41);
    const VaccinationSchedule vax(Date(2020, 5, 1), 1000, {0.002});
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs =
        synthesize_observations(init, SirParams(0.4, 0.1), 150, stringency, vax);
    const auto fit = fit_lockdown_vax_sir(obs, stringency);
    REQUIRE(fit.nu.has_value());
    CHECK(fit.params.beta == doctest::Approx(0.4).epsilon(0.05));
    CHECK(fit.params.gamma == doctest::Approx(0.1).epsilon(0.05));
    CHECK(*fit.nu == doctest::Approx(0.002).epsilon(0.10));
}

TEST_CASE("window search localizes a single vaccination-rate step")
{
    const auto stringency = random_stringency(121, 20.0, 70.0, 51);
    // Rate 0 for days 0..29, then 0.003 from day 30 on; with a 15-day window
    // the change lands exactly on window index 2.
    const VaccinationSchedule truth(Date(2020, 5, 1), 30, {0.0, 0.003, 0.003, 0.003});
    const SirParams p(0.4, 0.1);
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs = synthesize_observations(init, p, 120, stringency, truth);

    const auto res = window_search(obs, stringency, p.beta, p.gamma);
    REQUIRE(res.entries.size() == 10);
    for (std::size_t k = 0; k < res.entries.size(); ++k) {
        CHECK(res.entries[k].length == static_cast<int>(5 * (k + 1)));
        for (double rate : res.entries[k].schedule.rates()) {
            CHECK(rate >= 0.0);
        }
    }
    const auto& w15 = res.entries[2];
    REQUIRE(w15.length == 15);
    const auto& rates = w15.schedule.rates();
    REQUIRE(rates.size() >= 4);
    CHECK(rates[0] <= 3e-4);
    CHECK(rates[1] <= 3e-4);
    for (std::size_t k = 2; k < rates.size(); ++k) {
        CHECK(rates[k] == doctest::Approx(0.003).epsilon(0.10));
    }
}

TEST_CASE("window search is deterministic")
{
    const auto stringency = random_stringency(61, 30.0, 60.0, 61);
    const VaccinationSchedule vax(Date(2020, 5, 1), 20, {0.0, 0.002, 0.001});
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs =
        synthesize_observations(init, SirParams(0.35, 0.1), 60, stringency, vax);
    const auto a = window_search(obs, stringency, 0.35, 0.1);
    const auto b = window_search(obs, stringency, 0.35, 0.1);
    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(a.chosen_length == b.chosen_length);
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        CHECK(a.entries[k].loss_sir == b.entries[k].loss_sir);
        CHECK(a.entries[k].loss_i == b.entries[k].loss_i);
        CHECK(a.entries[k].schedule.rates() == b.entries[k].schedule.rates());
    }
}

TEST_CASE("refit with the zero schedule matches the lockdown fit")
{
    const auto stringency = random_stringency(121, 20.0, 70.0, 71);
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const auto obs =
        synthesize_observations(init, SirParams(0.4, 0.09), 120, stringency);
    const auto base = fit_lockdown_sir(obs, stringency);
    const auto refit = refit_with_schedule(obs, stringency,
                                           VaccinationSchedule::zero(Date(2020, 5, 1)));
    CHECK(refit.params.beta == doctest::Approx(base.params.beta).epsilon(1e-3));
    CHECK(refit.params.gamma == doctest::Approx(base.params.gamma).epsilon(1e-3));
}

TEST_CASE("refit with a known schedule recovers the generating rates")
{
    const auto stringency = random_stringency(151, 20.0, 70.0, 81);
    const VaccinationSchedule vax(Date(2020, 5, 1), 50, {0.0, 0.001, 0.004});
    const Compartments init(1e6 - 5e3, 5e3, 0.0, 1e6);
    const SirParams p(0.45, 0.11);
    const auto obs = synthesize_observations(init, p, 150, stringency, vax);
    const auto fit = refit_with_schedule(obs, stringency, vax);
    CHECK(fit.params.beta == doctest::Approx(p.beta).epsilon(0.05));
    CHECK(fit.params.gamma == doctest::Approx(p.gamma).epsilon(0.05));
    REQUIRE(fit.nu_schedule.has_value());
    CHECK(fit.nu_schedule->rates() == vax.rates());
}

TEST_CASE("fits are deterministic given identical inputs")
{
    const Compartments init(1e6 - 2e3, 2e3, 0.0, 1e6);
    const auto obs = synthesize_observations(init, SirParams(0.3, 0.1), 100);
    const auto a = fit_simple_sir(obs);
    const auto b = fit_simple_sir(obs);
    CHECK(a.params.beta == b.params.beta);
    CHECK(a.params.gamma == b.params.gamma);
    CHECK(a.loss_sir == b.loss_sir);
    CHECK(a.loss_i == b.loss_i);
}
