#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace sivcav::fit {

struct FitOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;   // on the residual/Jacobian-span cosine
    double step_tolerance = 1e-12;      // on the relative parameter step
    double relative_fd_step = 1e-6;     // forward-difference Jacobian step
    double initial_damping = 1e-3;
};

// Scalar model y(x; p). Must be deterministic and finite on the box.
using ModelFn = std::function<double(double, const Eigen::VectorXd&)>;

struct FitProblem {
    std::string model_id;
    ModelFn model;
    std::vector<std::string> parameter_names;  // name [unit] per parameter
    Eigen::VectorXd initial;
    Eigen::VectorXd lower;  // empty = unbounded
    Eigen::VectorXd upper;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;  // > 0, per-point
    FitOptions options;
};

struct FitResult {
    std::string model_id;
    std::vector<std::string> parameter_names;
    Eigen::VectorXd parameters;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 * reduced chi^2
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool singular = false;

    double sigma(Eigen::Index i) const;
};

void validate(const FitProblem& problem);

// Damped Gauss-Newton (Levenberg-Marquardt schedule) with box clamping.
// Deterministic: identical problems give bit-identical results. Throws on
// underdetermined input; singular Jacobians and non-convergence come back
// flagged with the best point found.
FitResult least_squares(const FitProblem& problem);

}  // namespace sivcav::fit
