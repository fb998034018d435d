#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace sivcav::qdyn {

struct CollapseOp {
    Eigen::MatrixXcd op;
    double rate = 0.0;  // [Hz]
};

// Small open quantum system, d >= 2. Hamiltonian in rad/s; each collapse
// channel contributes rate * (A rho A+ - 1/2 {A+A, rho}).
struct LindbladSystem {
    Eigen::MatrixXcd hamiltonian;
    std::vector<CollapseOp> collapse;
    int emission_index = -1;  // collapse channel whose clicks define g2

    int dimension() const { return static_cast<int>(hamiltonian.rows()); }
};

void validate(const LindbladSystem& system);

// Throws unless rho is Hermitian, unit trace and positive semidefinite
// within tolerance.
void validate_state(const Eigen::MatrixXcd& rho, double tolerance = 1e-9);

struct IntegratorOptions {
    // Fixed RK4 substep ceiling: step <= 1 / (steps_per_rate * dominant rate).
    double steps_per_rate = 100.0;
};

Eigen::MatrixXcd lindblad_rhs(const LindbladSystem& system, const Eigen::MatrixXcd& rho);

// Largest rate scale in the generator, used to pick the RK4 step.
double dominant_rate(const LindbladSystem& system);

// Density matrix at each requested time (times sorted ascending, first one
// >= 0; the state at times[0] is reached by integrating from t = 0).
std::vector<Eigen::MatrixXcd> lindblad_integrate(const LindbladSystem& system,
                                                 const Eigen::MatrixXcd& rho0,
                                                 std::span<const double> times,
                                                 const IntegratorOptions& options = {});

// Steady state via the superoperator nullspace with the unit-trace row
// substituted. Deterministic; throws if the solve does not produce a state.
Eigen::MatrixXcd steady_state(const LindbladSystem& system);

// Resonance-fluorescence workhorse: driven, damped two-level emitter.
struct TwoLevelParams {
    double decay_rate = 0.0;      // Gamma = 1/tau [Hz]
    double rabi_frequency = 0.0;  // Omega [rad/s]
    double pure_dephasing = 0.0;  // extra coherence decay [Hz]
    double detuning = 0.0;        // laser - transition [Hz]
};

void validate(const TwoLevelParams& params);

// Basis {|g>, |e>}; emission operator sigma-. Rotating frame at the laser.
LindbladSystem two_level_system(const TwoLevelParams& params);

}  // namespace sivcav::qdyn
