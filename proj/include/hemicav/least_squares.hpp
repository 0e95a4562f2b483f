#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hcav::fit {

struct LevenbergMarquardtOptions {
    int max_iterations = 200;
    double relative_tolerance = 1e-12;  // on cost decrease and step size
};

struct LevenbergMarquardtResult {
    Eigen::VectorXd params;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped Gauss-Newton with a forward-difference Jacobian. Never throws;
/// callers decide what non-convergence means.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd initial,
                                             const LevenbergMarquardtOptions& options = {});

}  // namespace hcav::fit
