#include "epictrl/calib/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epictrl/common/errors.hpp"

namespace epictrl::calib {

NelderMeadResult nelder_mead(const Objective& objective, const std::vector<double>& x0,
                             const NelderMeadOptions& opt)
{
    const std::size_t k = x0.size();
    if (k == 0) {
        throw DomainError("nelder_mead needs at least one dimension");
    }
    const double f0 = objective(x0);
    if (!std::isfinite(f0)) {
        throw FitError("objective is not finite at the seed");
    }

    // Initial simplex: seed plus a per-coordinate perturbation.
    std::vector<std::vector<double>> verts(k + 1, x0);
    std::vector<double> fvals(k + 1);
    fvals[0] = f0;
    for (std::size_t j = 0; j < k; ++j) {
        double step = opt.initial_step * std::abs(x0[j]);
        if (step == 0.0) {
            step = opt.initial_step * 0.005; // fminsearch-style zero handling
        }
        verts[j + 1][j] += step;
        fvals[j + 1] = objective(verts[j + 1]);
    }

    auto order = [&]() {
        std::vector<std::size_t> idx(k + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        std::vector<std::vector<double>> v2(k + 1);
        std::vector<double> f2(k + 1);
        for (std::size_t m = 0; m <= k; ++m) {
            v2[m] = verts[idx[m]];
            f2[m] = fvals[idx[m]];
        }
        verts.swap(v2);
        fvals.swap(f2);
    };

    NelderMeadResult res;
    std::size_t iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        order();
        const double spread = fvals[k] - fvals[0];
        bool tight = true;
        for (std::size_t m = 1; m <= k && tight; ++m) {
            for (std::size_t j = 0; j < k; ++j) {
                if (std::abs(verts[m][j] - verts[0][j]) >
                    opt.x_tolerance * std::max(1.0, std::abs(verts[0][j]))) {
                    tight = false;
                    break;
                }
            }
        }
        if (std::isfinite(spread) &&
            spread <= opt.tolerance * (std::abs(fvals[0]) + opt.tolerance) && tight) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(k, 0.0);
        for (std::size_t m = 0; m < k; ++m) {
            for (std::size_t j = 0; j < k; ++j) {
                centroid[j] += verts[m][j];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(k);
        }

        auto point = [&](double coeff) {
            std::vector<double> p(k);
            for (std::size_t j = 0; j < k; ++j) {
                p[j] = centroid[j] + coeff * (centroid[j] - verts[k][j]);
            }
            return p;
        };

        const auto xr = point(opt.reflection);
        const double fr = objective(xr);
        if (fr < fvals[0]) {
            const auto xe = point(opt.reflection * opt.expansion);
            const double fe = objective(xe);
            if (fe < fr) {
                verts[k] = xe;
                fvals[k] = fe;
            } else {
                verts[k] = xr;
                fvals[k] = fr;
            }
            continue;
        }
        if (fr < fvals[k - 1]) {
            verts[k] = xr;
            fvals[k] = fr;
            continue;
        }
        // Contraction, outside or inside depending on the reflected value.
        if (fr < fvals[k]) {
            const auto xc = point(opt.reflection * opt.contraction);
            const double fc = objective(xc);
            if (fc <= fr) {
                verts[k] = xc;
                fvals[k] = fc;
                continue;
            }
        } else {
            const auto xc = point(-opt.contraction);
            const double fc = objective(xc);
            if (fc < fvals[k]) {
                verts[k] = xc;
                fvals[k] = fc;
                continue;
            }
        }
        // Shrink towards the best vertex.
        for (std::size_t m = 1; m <= k; ++m) {
            for (std::size_t j = 0; j < k; ++j) {
                verts[m][j] = verts[0][j] + opt.shrink * (verts[m][j] - verts[0][j]);
            }
            fvals[m] = objective(verts[m]);
        }
    }
    order();
    res.argmin = verts[0];
    res.value = fvals[0];
    res.iterations = iter;
    return res;
}

} // namespace epictrl::calib
