#include "hemicav/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace hcav::fit {

namespace {

Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& p, const Eigen::VectorXd& r0) {
    Eigen::MatrixXd J(r0.size(), p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        Eigen::VectorXd q = p;
        const double h = 1e-7 * std::max(std::abs(p[j]), 1e-3);
        q[j] += h;
        J.col(j) = (f(q) - r0) / h;
    }
    return J;
}

}  // namespace

LevenbergMarquardtResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd initial,
                                             const LevenbergMarquardtOptions& options) {
    LevenbergMarquardtResult out;
    out.params = std::move(initial);
    Eigen::VectorXd r = residuals(out.params);
    out.cost = r.squaredNorm();
    double lambda = 1e-3;

    for (int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd J = jacobian(residuals, out.params, r);
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd trial = out.params + step;
            const Eigen::VectorXd rt = residuals(trial);
            const double cost = rt.squaredNorm();
            if (std::isfinite(cost) && cost <= out.cost) {
                const double decrease = out.cost - cost;
                const double step_rel = step.norm() / std::max(out.params.norm(), 1e-30);
                out.params = trial;
                r = rt;
                const double previous = out.cost;
                out.cost = cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (decrease <= options.relative_tolerance * previous ||
                    step_rel <= options.relative_tolerance) {
                    out.converged = true;
                    return out;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            // No downhill step exists at any damping: we sit at a minimum.
            out.converged = true;
            return out;
        }
    }
    return out;
}

}  // namespace hcav::fit
