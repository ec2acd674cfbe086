#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ppwg/errors.hpp"

namespace ppwg {

// Damped Gauss-Newton (Levenberg style) for small dense problems with an
// analytic Jacobian. The residual callback fills r (size m) and J (m x p)
// at the given parameter vector.
struct LevmarOptions {
    int max_iterations = 100;
    double parameter_tolerance = 1e-8;  // relative step size for convergence
    double initial_lambda = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
};

struct LevmarResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 at the solution
    double ssr = 0.0;
    int iterations = 0;
};

using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)>;

inline LevmarResult levmar_fit(const ResidualFn& eval, Eigen::VectorXd p0, int m,
                               const LevmarOptions& opt = {}) {
    const int np = static_cast<int>(p0.size());
    Eigen::VectorXd r(m);
    Eigen::MatrixXd J(m, np);
    eval(p0, r, J);
    double ssr = r.squaredNorm();
    double lambda = opt.initial_lambda;

    LevmarResult out;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtr = J.transpose() * r;
        Eigen::MatrixXd damped = JtJ;
        damped.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
        const Eigen::VectorXd step = damped.ldlt().solve(-Jtr);
        if (!step.allFinite())
            throw NumericalError("damped least-squares step is not finite");

        const Eigen::VectorXd p_try = p0 + step;
        Eigen::VectorXd r_try(m);
        Eigen::MatrixXd J_try(m, np);
        eval(p_try, r_try, J_try);
        const double ssr_try = r_try.squaredNorm();
        if (ssr_try <= ssr) {
            const double rel_step =
                step.norm() / std::max(1e-30, p_try.norm());
            p0 = p_try;
            r = r_try;
            J = J_try;
            ssr = ssr_try;
            lambda = std::max(1e-12, lambda * opt.lambda_down);
            if (rel_step < opt.parameter_tolerance) {
                ++it;
                break;
            }
        } else {
            lambda *= opt.lambda_up;
            if (lambda > 1e12)
                throw NumericalError("damped least-squares fit failed to converge");
        }
    }
    if (it >= opt.max_iterations)
        throw NumericalError("damped least-squares fit did not converge within the "
                             "iteration limit");

    out.params = p0;
    out.ssr = ssr;
    out.iterations = it;
    const int dof = m - np;
    const double s2 = dof > 0 ? ssr / dof : 0.0;
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    out.covariance = s2 * JtJ.completeOrthogonalDecomposition().pseudoInverse();
    return out;
}

}  // namespace ppwg
