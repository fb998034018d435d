#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sivcav/fit.hpp"
#include "sivcav/rng.hpp"

using namespace sivcav;

namespace {

fit::FitProblem line_problem() {
    fit::FitProblem p;
    p.model_id = "line";
    p.model = [](double x, const Eigen::VectorXd& q) { return q(0) * x + q(1); };
    p.parameter_names = {"slope", "offset"};
    p.initial = Eigen::VectorXd::Zero(2);
    for (int i = 0; i < 20; ++i) {
        const double x = 0.1 * i;
        p.x.push_back(x);
        p.y.push_back(2.5 * x - 1.25);
        p.sigma.push_back(0.1);
    }
    return p;
}

}  // namespace

TEST_CASE("noise-free line is recovered to machine precision") {
    const auto r = fit::least_squares(line_problem());
    CHECK(r.converged);
    CHECK_FALSE(r.singular);
    CHECK(r.parameters(0) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(r.parameters(1) == doctest::Approx(-1.25).epsilon(1e-10));
    CHECK(r.chi2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(r.model_id == "line");
    CHECK(r.parameter_names.size() == 2);
}

TEST_CASE("parameters near 1e11 iterate instead of stalling at the guess") {
    // Exponential decay with amplitude and offset at photon-count scale.
    // A convergence test that is not scale-invariant sees a tiny raw
    // gradient here and accepts the initial point unchanged; this fixture
    // fails loudly in that case.
    const double a_true = 1.7e11;
    const double c_true = 7.0e10;
    fit::FitProblem p;
    p.model_id = "decay";
    p.model = [](double x, const Eigen::VectorXd& q) {
        return q(0) * std::exp(-x) + q(1);
    };
    p.parameter_names = {"amplitude", "offset"};
    p.initial = Eigen::VectorXd(2);
    p.initial << 1.5e11, 6.0e10;
    for (int i = 0; i < 50; ++i) {
        const double x = 0.05 * i;
        p.x.push_back(x);
        p.y.push_back(a_true * std::exp(-x) + c_true);
        p.sigma.push_back(1e9);
    }
    const auto r = fit::least_squares(p);
    CHECK(r.converged);
    CHECK(r.iterations >= 1);
    CHECK(r.parameters(0) == doctest::Approx(a_true).epsilon(1e-9));
    CHECK(r.parameters(1) == doctest::Approx(c_true).epsilon(1e-9));
}

TEST_CASE("restarting at the optimum converges without stepping") {
    fit::FitProblem p = line_problem();
    p.initial << 2.5, -1.25;
    const auto r = fit::least_squares(p);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.parameters(0) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("fit is invariant under a unit rescaling of x") {
    // Same decay expressed in seconds and nanoseconds; the recovered decay
    // constants must agree after conversion, a direct probe of internal
    // scale sensitivity.
    auto build = [](double unit) {
        fit::FitProblem p;
        p.model_id = "exp";
        p.model = [](double x, const Eigen::VectorXd& q) {
            return q(0) * std::exp(-x / q(1));
        };
        p.parameter_names = {"amplitude", "tau"};
        p.initial = Eigen::VectorXd(2);
        p.initial << 0.8, 2.0 * unit;
        for (int i = 1; i <= 30; ++i) {
            const double x = 0.2 * i * unit;
            p.x.push_back(x);
            p.y.push_back(1.3 * std::exp(-x / (1.7 * unit)));
            p.sigma.push_back(0.01);
        }
        return p;
    };
    const auto rs = fit::least_squares(build(1.0));
    const auto rn = fit::least_squares(build(1e-9));
    CHECK(rs.converged);
    CHECK(rn.converged);
    CHECK(rs.parameters(1) == doctest::Approx(1.7).epsilon(1e-8));
    CHECK(rn.parameters(1) / 1e-9 == doctest::Approx(rs.parameters(1)).epsilon(1e-6));
    CHECK(rn.parameters(0) == doctest::Approx(rs.parameters(0)).epsilon(1e-6));
}

TEST_CASE("box bounds clamp the trajectory and the result") {
    // Data pull the offset negative, the box forbids it.
    fit::FitProblem p;
    p.model_id = "const";
    p.model = [](double, const Eigen::VectorXd& q) { return q(0); };
    p.parameter_names = {"level"};
    p.initial = Eigen::VectorXd::Constant(1, 0.5);
    p.lower = Eigen::VectorXd::Constant(1, 0.0);
    p.upper = Eigen::VectorXd::Constant(1, 10.0);
    for (int i = 0; i < 10; ++i) {
        p.x.push_back(i);
        p.y.push_back(-3.0);
        p.sigma.push_back(0.5);
    }
    const auto r = fit::least_squares(p);
    CHECK(r.parameters(0) >= 0.0);
    CHECK(r.parameters(0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("reported uncertainties cover the truth at the expected rate") {
    // 200 independent noisy line fits; the 2-sigma interval should cover
    // the true slope in roughly 95% of trials. A deterministic seed makes
    // the observed count a frozen regression value, far above the ~90%
    // floor checked here.
    rng::Engine eng(424242);
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        fit::FitProblem p;
        p.model_id = "line";
        p.model = [](double x, const Eigen::VectorXd& q) { return q(0) * x + q(1); };
        p.parameter_names = {"slope", "offset"};
        p.initial = Eigen::VectorXd::Zero(2);
        for (int i = 0; i < 25; ++i) {
            const double x = 0.2 * i;
            p.x.push_back(x);
            p.y.push_back(1.8 * x + 0.6 + eng.normal(0.0, 0.15));
            p.sigma.push_back(0.15);
        }
        const auto r = fit::least_squares(p);
        REQUIRE(r.converged);
        if (std::abs(r.parameters(0) - 1.8) < 2.0 * r.sigma(0)) ++covered;
    }
    CHECK(covered >= 180);
}

TEST_CASE("chi-squared statistics are reported consistently") {
    rng::Engine eng(11);
    fit::FitProblem p = line_problem();
    for (std::size_t i = 0; i < p.y.size(); ++i) p.y[i] += eng.normal(0.0, 0.1);
    const auto r = fit::least_squares(p);
    CHECK(r.converged);
    // 20 points, 2 parameters: chi2 = 18 * reduced chi2.
    CHECK(r.chi2 == doctest::Approx(18.0 * r.reduced_chi2).epsilon(1e-12));
    CHECK(r.reduced_chi2 > 0.2);
    CHECK(r.reduced_chi2 < 3.0);
}

TEST_CASE("invalid problems are rejected up front") {
    fit::FitProblem p = line_problem();

    SUBCASE("more parameters than points") {
        p.x.resize(1);
        p.y.resize(1);
        p.sigma.resize(1);
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("non-positive sigma") {
        p.sigma[3] = 0.0;
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("missing model") {
        p.model = nullptr;
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("bound size mismatch") {
        p.lower = Eigen::VectorXd::Zero(1);
        p.upper = Eigen::VectorXd::Constant(1, 1.0);
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("mismatched x and y lengths") {
        p.y.pop_back();
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("inverted bounds") {
        p.lower = Eigen::VectorXd::Constant(2, 2.0);
        p.upper = Eigen::VectorXd::Constant(2, 1.0);
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
    SUBCASE("parameter name count mismatch") {
        p.parameter_names = {"slope"};
        CHECK_THROWS_AS(fit::least_squares(p), std::invalid_argument);
    }
}

TEST_CASE("an initial guess outside the box is clamped, not rejected") {
    fit::FitProblem p = line_problem();
    p.lower = Eigen::VectorXd::Constant(2, -2.0);
    p.upper = Eigen::VectorXd::Constant(2, 3.0);
    p.initial << -100.0, 100.0;
    const auto r = fit::least_squares(p);
    CHECK(r.converged);
    CHECK(r.parameters(0) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(r.parameters(1) == doctest::Approx(-1.25).epsilon(1e-9));
}

TEST_CASE("insensitive parameters flag a singular covariance") {
    fit::FitProblem p;
    p.model_id = "flat";
    // q(1) never enters the model.
    p.model = [](double, const Eigen::VectorXd& q) { return q(0); };
    p.parameter_names = {"level", "ghost"};
    p.initial = Eigen::VectorXd::Constant(2, 1.0);
    for (int i = 0; i < 12; ++i) {
        p.x.push_back(i);
        p.y.push_back(2.0);
        p.sigma.push_back(0.1);
    }
    const auto r = fit::least_squares(p);
    CHECK(r.singular);
    CHECK(std::isnan(r.covariance(1, 1)));
    CHECK(std::isnan(r.sigma(1)));
    // The sensitive direction still converged to the data mean.
    CHECK(r.parameters(0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("results are bit-identical across repeated runs") {
    rng::Engine eng(77);
    fit::FitProblem p = line_problem();
    for (std::size_t i = 0; i < p.y.size(); ++i) p.y[i] += eng.normal(0.0, 0.1);
    const auto a = fit::least_squares(p);
    const auto b = fit::least_squares(p);
    CHECK(a.parameters(0) == b.parameters(0));
    CHECK(a.parameters(1) == b.parameters(1));
    CHECK(a.chi2 == b.chi2);
    CHECK(a.iterations == b.iterations);
}
