#ifndef EPICTRL_CALIB_NELDER_MEAD_HPP
#define EPICTRL_CALIB_NELDER_MEAD_HPP

#include <functional>
#include <vector>

namespace epictrl::calib {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    /// Converged when the simplex value spread is below this, relative to the
    /// best value.
    double tolerance = 1e-8;
    /// Additional geometric criterion: the simplex must also have collapsed to
    /// this relative size, so a symmetric straddle of a minimum cannot
    /// terminate early at an inaccurate vertex.
    double x_tolerance = 1e-6;
    std::size_t max_iterations = 2000;
    /// Relative size of the initial simplex perturbation per coordinate.
    double initial_step = 0.05;
};

struct NelderMeadResult {
    std::vector<double> argmin;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Downhill-simplex minimization. The objective may return +inf to encode
/// constraints but must be finite at the seed.
NelderMeadResult nelder_mead(const Objective& objective, const std::vector<double>& x0,
                             const NelderMeadOptions& options = {});

} // namespace epictrl::calib

#endif
