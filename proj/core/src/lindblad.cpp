#include "sivcav/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "sivcav/constants.hpp"

namespace sivcav::qdyn {

namespace {

using Eigen::MatrixXcd;
using std::complex;

constexpr complex<double> kI{0.0, 1.0};

// vec(A rho B) = (B^T kron A) vec(rho), column-major vec.
MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

void validate(const LindbladSystem& system) {
    const auto d = system.hamiltonian.rows();
    if (d < 2 || system.hamiltonian.cols() != d)
        throw std::invalid_argument("hamiltonian must be square with dimension >= 2");
    if ((system.hamiltonian - system.hamiltonian.adjoint()).norm() > 1e-9 * std::max(1.0, system.hamiltonian.norm()))
        throw std::invalid_argument("hamiltonian must be Hermitian");
    for (const auto& c : system.collapse) {
        if (c.op.rows() != d || c.op.cols() != d)
            throw std::invalid_argument("collapse operator dimension mismatch");
        if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
            throw std::invalid_argument("collapse rate must be finite and non-negative");
    }
    if (system.emission_index >= static_cast<int>(system.collapse.size()))
        throw std::invalid_argument("emission_index out of range");
}

void validate_state(const Eigen::MatrixXcd& rho, double tolerance) {
    if (rho.rows() != rho.cols() || rho.rows() < 1)
        throw std::invalid_argument("density matrix must be square");
    if ((rho - rho.adjoint()).norm() > tolerance * std::max(1.0, rho.norm()))
        throw std::invalid_argument("density matrix must be Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tolerance || std::abs(rho.trace().imag()) > tolerance)
        throw std::invalid_argument("density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tolerance)
        throw std::invalid_argument("density matrix must be positive semidefinite");
}

Eigen::MatrixXcd lindblad_rhs(const LindbladSystem& system, const Eigen::MatrixXcd& rho) {
    MatrixXcd out = -kI * (system.hamiltonian * rho - rho * system.hamiltonian);
    for (const auto& c : system.collapse) {
        if (c.rate == 0.0) continue;
        const MatrixXcd ada = c.op.adjoint() * c.op;
        out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

double dominant_rate(const LindbladSystem& system) {
    double rate = system.hamiltonian.norm();  // rad/s, Frobenius upper bound
    for (const auto& c : system.collapse) rate = std::max(rate, c.rate * c.op.squaredNorm());
    return rate;
}

std::vector<Eigen::MatrixXcd> lindblad_integrate(const LindbladSystem& system,
                                                 const Eigen::MatrixXcd& rho0,
                                                 std::span<const double> times,
                                                 const IntegratorOptions& options) {
    validate(system);
    validate_state(rho0);
    if (rho0.rows() != system.hamiltonian.rows())
        throw std::invalid_argument("state dimension does not match system");
    if (times.empty()) return {};
    if (times.front() < 0.0 || !std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("times must be sorted and non-negative");
    if (!(options.steps_per_rate > 0.0))
        throw std::invalid_argument("steps_per_rate must be positive");

    const double rate = dominant_rate(system);
    const double max_step = rate > 0.0 ? 1.0 / (options.steps_per_rate * rate)
                                       : std::numeric_limits<double>::infinity();

    std::vector<MatrixXcd> out;
    out.reserve(times.size());
    MatrixXcd rho = rho0;
    double t = 0.0;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const long n = std::isfinite(max_step) ? std::max(1L, std::lround(std::ceil(span / max_step))) : 1L;
            const double h = span / static_cast<double>(n);
            for (long i = 0; i < n; ++i) {
                const MatrixXcd k1 = lindblad_rhs(system, rho);
                const MatrixXcd k2 = lindblad_rhs(system, rho + 0.5 * h * k1);
                const MatrixXcd k3 = lindblad_rhs(system, rho + 0.5 * h * k2);
                const MatrixXcd k4 = lindblad_rhs(system, rho + h * k3);
                rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        out.push_back(rho);
    }
    return out;
}

Eigen::MatrixXcd steady_state(const LindbladSystem& system) {
    validate(system);
    const Eigen::Index d = system.hamiltonian.rows();
    const MatrixXcd id = MatrixXcd::Identity(d, d);

    MatrixXcd gen = -kI * (kron(id, system.hamiltonian) - kron(system.hamiltonian.transpose(), id));
    for (const auto& c : system.collapse) {
        if (c.rate == 0.0) continue;
        const MatrixXcd ada = c.op.adjoint() * c.op;
        gen += c.rate * (kron(c.op.conjugate(), c.op) -
                         0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id));
    }

    // Substitute the first row with the trace constraint tr(rho) = 1.
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
    gen.row(0).setZero();
    for (Eigen::Index k = 0; k < d; ++k) gen(0, k * d + k) = 1.0;
    rhs(0) = 1.0;

    const Eigen::VectorXcd v = gen.fullPivLu().solve(rhs);
    if (!v.allFinite() || (gen * v - rhs).norm() > 1e-6)
        throw std::runtime_error("steady-state solve failed");

    MatrixXcd rho(d, d);
    for (Eigen::Index j = 0; j < d; ++j) rho.col(j) = v.segment(j * d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();  // clip numerical skew
    rho /= rho.trace().real();
    return rho;
}

void validate(const TwoLevelParams& params) {
    if (!(params.decay_rate > 0.0)) throw std::invalid_argument("decay_rate must be positive");
    if (params.pure_dephasing < 0.0) throw std::invalid_argument("pure_dephasing must be non-negative");
    if (!std::isfinite(params.rabi_frequency) || !std::isfinite(params.detuning))
        throw std::invalid_argument("drive parameters must be finite");
}

LindbladSystem two_level_system(const TwoLevelParams& params) {
    validate(params);
    LindbladSystem system;
    system.hamiltonian = MatrixXcd::Zero(2, 2);
    system.hamiltonian(1, 1) = -constants::two_pi * params.detuning;
    system.hamiltonian(0, 1) = 0.5 * params.rabi_frequency;
    system.hamiltonian(1, 0) = 0.5 * params.rabi_frequency;

    MatrixXcd lower = MatrixXcd::Zero(2, 2);
    lower(0, 1) = 1.0;  // sigma- = |g><e|
    system.collapse.push_back({lower, params.decay_rate});
    system.emission_index = 0;

    if (params.pure_dephasing > 0.0) {
        MatrixXcd sz = MatrixXcd::Zero(2, 2);
        sz(0, 0) = 1.0;
        sz(1, 1) = -1.0;
        // rate gamma_phi/2 on sigma_z adds gamma_phi to the coherence decay
        system.collapse.push_back({sz, 0.5 * params.pure_dephasing});
    }
    return system;
}

}  // namespace sivcav::qdyn
