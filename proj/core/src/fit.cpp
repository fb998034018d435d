#include "sivcav/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sivcav::fit {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd p, const FitProblem& problem) {
    if (problem.lower.size() > 0)
        for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = std::max(p(j), problem.lower(j));
    if (problem.upper.size() > 0)
        for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = std::min(p(j), problem.upper(j));
    return p;
}

Eigen::VectorXd residuals(const FitProblem& problem, const Eigen::VectorXd& p) {
    const auto n = static_cast<Eigen::Index>(problem.x.size());
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        r(i) = (problem.model(problem.x[idx], p) - problem.y[idx]) / problem.sigma[idx];
    }
    return r;
}

// Per-parameter step scale: the current magnitude when it is meaningful, the
// initial guess otherwise, unit as a last resort. Keeps forward differences
// sane for parameters whose natural scale is far from 1 (times in seconds,
// rates in Hz).
double fd_scale(const Eigen::VectorXd& p, const Eigen::VectorXd& initial, Eigen::Index j) {
    const double m = std::max(std::abs(p(j)), std::abs(initial(j)));
    return m > 0.0 ? m : 1.0;
}

Eigen::MatrixXd jacobian(const FitProblem& problem, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& r0) {
    const auto n = r0.size();
    const auto k = p.size();
    Eigen::MatrixXd jac(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double h = problem.options.relative_fd_step * fd_scale(p, problem.initial, j);
        Eigen::VectorXd ph = p;
        ph(j) += h;
        jac.col(j) = (residuals(problem, ph) - r0) / h;
    }
    return jac;
}

}  // namespace

double FitResult::sigma(Eigen::Index i) const {
    return std::sqrt(std::max(covariance(i, i), 0.0));
}

void validate(const FitProblem& problem) {
    if (!problem.model) throw std::invalid_argument("fit model missing");
    const auto n = problem.x.size();
    if (problem.y.size() != n || problem.sigma.size() != n)
        throw std::invalid_argument("data columns must have equal length");
    const auto k = problem.initial.size();
    if (k < 1) throw std::invalid_argument("no parameters to fit");
    if (static_cast<Eigen::Index>(n) < k)
        throw std::invalid_argument("underdetermined fit: fewer points than parameters");
    for (double s : problem.sigma)
        if (!(s > 0.0)) throw std::invalid_argument("per-point sigma must be positive");
    if (problem.lower.size() > 0 && problem.lower.size() != k)
        throw std::invalid_argument("lower bound size mismatch");
    if (problem.upper.size() > 0 && problem.upper.size() != k)
        throw std::invalid_argument("upper bound size mismatch");
    if (problem.lower.size() > 0 && problem.upper.size() > 0)
        for (Eigen::Index j = 0; j < k; ++j)
            if (problem.lower(j) > problem.upper(j))
                throw std::invalid_argument("lower bound exceeds upper bound");
    if (!problem.parameter_names.empty() &&
        static_cast<Eigen::Index>(problem.parameter_names.size()) != k)
        throw std::invalid_argument("parameter name count mismatch");
}

FitResult least_squares(const FitProblem& problem) {
    validate(problem);
    const auto k = problem.initial.size();
    const auto n = static_cast<Eigen::Index>(problem.x.size());

    FitResult result;
    result.model_id = problem.model_id;
    result.parameter_names = problem.parameter_names;

    Eigen::VectorXd p = clamp_to_box(problem.initial, problem);
    Eigen::VectorXd r = residuals(problem, p);
    double chi2 = r.squaredNorm();
    double lambda = problem.options.initial_damping;

    Eigen::MatrixXd jac = jacobian(problem, p, r);
    int iter = 0;
    for (; iter < problem.options.max_iterations; ++iter) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;

        // First-order test on the cosine between the residual and the span of
        // the Jacobian columns. Dimensionless, so parameters of any magnitude
        // are treated alike; a raw gradient norm shrinks with the parameter
        // scale and would stop large-scale fits at their initial guess.
        const double rnorm = r.norm();
        if (rnorm == 0.0) {
            result.converged = true;
            break;
        }
        bool sensitive = false;
        double cosine = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double cn = jac.col(j).norm();
            if (cn > 0.0) {
                sensitive = true;
                cosine = std::max(cosine, std::abs(grad(j)) / (cn * rnorm));
            }
        }
        if (sensitive && cosine < problem.options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd diag = jtj.diagonal();
        const double diag_floor = 1e-32 * std::max(1.0, diag.maxCoeff());
        if (diag.maxCoeff() <= 0.0) {
            result.singular = true;  // model insensitive to every parameter
            break;
        }
        for (Eigen::Index j = 0; j < k; ++j) diag(j) = std::max(diag(j), diag_floor);

        // Marquardt scaling: damping proportional to the curvature diagonal
        // makes the step invariant under per-parameter rescaling.
        bool accepted = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd delta = a.ldlt().solve(-grad);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = clamp_to_box(p + delta, problem);
            const Eigen::VectorXd r_trial = residuals(problem, trial);
            const double chi2_trial = r_trial.squaredNorm();
            if (std::isfinite(chi2_trial) && chi2_trial <= chi2) {
                const double rel_step = (trial - p).norm() / std::max(p.norm(), 1e-300);
                p = trial;
                r = r_trial;
                const bool tiny = rel_step < problem.options.step_tolerance ||
                                  chi2 - chi2_trial <= 1e-14 * std::max(1.0, chi2);
                chi2 = chi2_trial;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (tiny) result.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted || result.converged) break;  // !accepted: stuck, flagged below
        jac = jacobian(problem, p, r);
    }

    result.parameters = p;
    result.chi2 = chi2;
    result.iterations = iter;
    const Eigen::Index dof = n - k;
    result.reduced_chi2 = dof > 0 ? chi2 / static_cast<double>(dof) : chi2;

    // Covariance from the normal matrix inverted in its unit-diagonal scaling
    // D^-1 (JtJ) D^-1: parameter magnitudes spanning many orders would
    // otherwise trip the pivot threshold of the raw inverse even though the
    // scaled system is well conditioned.
    jac = jacobian(problem, p, r);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd d = jtj.diagonal().cwiseMax(0.0).cwiseSqrt();
    bool invertible = (d.array() > 0.0).all();
    if (invertible) {
        const Eigen::VectorXd dinv = d.cwiseInverse();
        const Eigen::MatrixXd scaled = dinv.asDiagonal() * jtj * dinv.asDiagonal();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
        invertible = lu.isInvertible();
        if (invertible) {
            const double scale = dof > 0 ? result.reduced_chi2 : 1.0;
            result.covariance = dinv.asDiagonal() * lu.inverse() * dinv.asDiagonal() * scale;
            result.covariance = 0.5 * (result.covariance + result.covariance.transpose()).eval();
        }
    }
    if (!invertible) {
        result.singular = true;
        result.covariance = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

}  // namespace sivcav::fit
