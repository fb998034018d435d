#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sivcav/lindblad.hpp"

namespace sivcav::g2 {

struct CorrelationTrace {
    std::vector<double> tau;  // [s], non-negative
    std::vector<double> g2;
};

// Closed form for the resonantly driven two-level emitter without extra
// dephasing (underdamped, critical and overdamped branches). Throws when the
// parameters fall outside that regime.
CorrelationTrace g2_analytic(const qdyn::TwoLevelParams& params, std::span<const double> tau);

// Quantum-regression evaluation: reset to the post-click state and follow the
// excited population back to steady state. Works for any system that exposes
// an emission channel.
CorrelationTrace g2_numeric(const qdyn::LindbladSystem& system, std::span<const double> tau,
                            const qdyn::IntegratorOptions& options = {});

// Detector-facing trace: uncorrelated background mixes as
// 1 + rho^2 (g2 - 1) with rho = S/(S+B), then a Gaussian timing response of
// the given FWHM smears the result. The trace is mirrored to negative delay
// before convolving so the dip keeps its even symmetry. Requires a uniform
// tau grid when irf_fwhm > 0.
CorrelationTrace g2_measured(const CorrelationTrace& ideal, double signal_to_background,
                             double irf_fwhm);

struct Histogram {
    std::vector<double> tau;     // [s]
    std::vector<double> counts;  // per bin
    std::uint64_t seed = 0;
};

// Coincidence histogram with Poisson shot noise: expected counts per bin are
// counts_scale * measured g2 (background mixing and IRF included).
Histogram simulate_histogram(const qdyn::TwoLevelParams& params, double signal_to_background,
                             double irf_fwhm, std::span<const double> tau, double counts_scale,
                             std::uint64_t seed);

struct BackgroundSolution {
    double rho = 0.0;           // S/(S+B)
    double achieved_dip = 0.0;  // min of the modelled measured trace
};

// Find the signal fraction rho that reproduces an observed antibunching dip
// through the full measurement model. Bisection on [0, 1]; the dip is
// monotone in rho. Converges to tolerance in rho.
BackgroundSolution solve_background_ratio(const qdyn::TwoLevelParams& params, double irf_fwhm,
                                          double target_dip, double tau_max, int n_points,
                                          double tolerance = 1e-3);

}  // namespace sivcav::g2
