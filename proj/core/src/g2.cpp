#include "sivcav/g2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sivcav/rng.hpp"

namespace sivcav::g2 {

namespace {

void check_tau_grid(std::span<const double> tau) {
    if (tau.empty()) throw std::invalid_argument("empty delay grid");
    if (tau.front() < 0.0 || !std::is_sorted(tau.begin(), tau.end()))
        throw std::invalid_argument("delays must be sorted and non-negative");
}

double uniform_step(std::span<const double> tau) {
    if (tau.size() < 2) throw std::invalid_argument("need at least two delay points");
    const double h = tau[1] - tau[0];
    for (std::size_t i = 1; i + 1 < tau.size(); ++i)
        if (std::abs((tau[i + 1] - tau[i]) - h) > 1e-9 * std::max(h, 1e-300))
            throw std::invalid_argument("delay grid must be uniform");
    if (!(h > 0.0)) throw std::invalid_argument("delay grid must be strictly increasing");
    return h;
}

}  // namespace

CorrelationTrace g2_analytic(const qdyn::TwoLevelParams& params, std::span<const double> tau) {
    qdyn::validate(params);
    if (params.detuning != 0.0 || params.pure_dephasing != 0.0)
        throw std::invalid_argument("closed form holds only on resonance without extra dephasing");
    check_tau_grid(tau);

    const double gamma = params.decay_rate;
    const double omega = std::abs(params.rabi_frequency);
    const double env = 0.75 * gamma;
    const double disc = omega * omega - 0.0625 * gamma * gamma;  // mu^2

    CorrelationTrace out;
    out.tau.assign(tau.begin(), tau.end());
    out.g2.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double t = tau[i];
        double bracket;
        if (disc > 0.0) {
            const double mu = std::sqrt(disc);
            bracket = std::cos(mu * t) + (env / mu) * std::sin(mu * t);
        } else if (disc < 0.0) {
            const double nu = std::sqrt(-disc);
            bracket = std::cosh(nu * t) + (env / nu) * std::sinh(nu * t);
        } else {
            bracket = 1.0 + env * t;
        }
        out.g2[i] = 1.0 - std::exp(-env * t) * bracket;
    }
    return out;
}

CorrelationTrace g2_numeric(const qdyn::LindbladSystem& system, std::span<const double> tau,
                            const qdyn::IntegratorOptions& options) {
    qdyn::validate(system);
    check_tau_grid(tau);
    if (system.emission_index < 0)
        throw std::invalid_argument("system has no emission channel");
    const auto& channel = system.collapse[static_cast<std::size_t>(system.emission_index)];

    const Eigen::MatrixXcd rho_ss = qdyn::steady_state(system);
    const Eigen::MatrixXcd jumped = channel.op * rho_ss * channel.op.adjoint();
    const double flux = jumped.trace().real();
    if (!(flux > 0.0)) throw std::runtime_error("steady state emits no photons");

    // Post-click state, then the regression theorem turns the two-time
    // correlation into a one-time population trace.
    const Eigen::MatrixXcd rho0 = jumped / flux;
    const auto states = qdyn::lindblad_integrate(system, rho0, tau, options);

    const Eigen::MatrixXcd ada = channel.op.adjoint() * channel.op;
    CorrelationTrace out;
    out.tau.assign(tau.begin(), tau.end());
    out.g2.resize(tau.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        out.g2[i] = (ada * states[i]).trace().real() / flux;
    return out;
}

CorrelationTrace g2_measured(const CorrelationTrace& ideal, double signal_to_background,
                             double irf_fwhm) {
    if (ideal.tau.size() != ideal.g2.size()) throw std::invalid_argument("trace size mismatch");
    check_tau_grid(ideal.tau);
    if (!(signal_to_background >= 0.0)) throw std::invalid_argument("S/B must be non-negative");
    if (irf_fwhm < 0.0) throw std::invalid_argument("IRF width must be non-negative");

    const double rho = signal_to_background / (1.0 + signal_to_background);
    CorrelationTrace out;
    out.tau = ideal.tau;
    out.g2.resize(ideal.g2.size());
    for (std::size_t i = 0; i < ideal.g2.size(); ++i)
        out.g2[i] = 1.0 + rho * rho * (ideal.g2[i] - 1.0);

    if (irf_fwhm == 0.0) return out;

    const double h = uniform_step(ideal.tau);
    if (std::abs(ideal.tau.front()) > 1e-12 * h)
        throw std::invalid_argument("IRF convolution expects a grid starting at zero delay");
    const double sigma = irf_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));

    // Even extension around tau = 0; histograms are symmetric in delay.
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.g2.size());
    std::vector<double> ext(static_cast<std::size_t>(2 * n - 1));
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ext[static_cast<std::size_t>(n - 1 + i)] = out.g2[static_cast<std::size_t>(i)];
        ext[static_cast<std::size_t>(n - 1 - i)] = out.g2[static_cast<std::size_t>(i)];
    }

    const std::ptrdiff_t half = std::max<std::ptrdiff_t>(1, std::lround(std::ceil(6.0 * sigma / h)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    double norm = 0.0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
        const double x = static_cast<double>(k) * h / sigma;
        const double w = std::exp(-0.5 * x * x);
        kernel[static_cast<std::size_t>(k + half)] = w;
        norm += w;
    }
    for (double& w : kernel) w /= norm;

    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -half; k <= half; ++k) {
            std::ptrdiff_t j = (n - 1 + i) + k;
            // Clamp at the far edge: the trace has settled to its asymptote.
            j = std::clamp<std::ptrdiff_t>(j, 0, 2 * n - 2);
            acc += kernel[static_cast<std::size_t>(k + half)] * ext[static_cast<std::size_t>(j)];
        }
        out.g2[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Histogram simulate_histogram(const qdyn::TwoLevelParams& params, double signal_to_background,
                             double irf_fwhm, std::span<const double> tau, double counts_scale,
                             std::uint64_t seed) {
    if (!(counts_scale > 0.0)) throw std::invalid_argument("counts scale must be positive");
    const CorrelationTrace ideal = g2_analytic(params, tau);
    const CorrelationTrace meas = g2_measured(ideal, signal_to_background, irf_fwhm);

    Histogram hist;
    hist.tau.assign(tau.begin(), tau.end());
    hist.counts.resize(tau.size());
    hist.seed = seed;
    rng::Engine engine(seed);
    for (std::size_t i = 0; i < tau.size(); ++i)
        hist.counts[i] = static_cast<double>(engine.poisson(counts_scale * meas.g2[i]));
    return hist;
}

BackgroundSolution solve_background_ratio(const qdyn::TwoLevelParams& params, double irf_fwhm,
                                          double target_dip, double tau_max, int n_points,
                                          double tolerance) {
    if (!(target_dip >= 0.0) || !(target_dip < 1.0))
        throw std::invalid_argument("target dip must lie in [0, 1)");
    if (!(tau_max > 0.0) || n_points < 16)
        throw std::invalid_argument("delay grid too small to resolve the dip");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

    std::vector<double> tau(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        tau[static_cast<std::size_t>(i)] = tau_max * static_cast<double>(i) / (n_points - 1);
    const CorrelationTrace ideal = g2_analytic(params, tau);

    const auto dip_for = [&](double rho) {
        // g2_measured takes S/B; map from the signal fraction.
        const double sb = rho >= 1.0 ? std::numeric_limits<double>::infinity() : rho / (1.0 - rho);
        const CorrelationTrace m = g2_measured(ideal, sb, irf_fwhm);
        return *std::min_element(m.g2.begin(), m.g2.end());
    };

    // dip(0) = 1, dip decreases monotonically with rho.
    double lo = 0.0, hi = 1.0 - 1e-12;
    if (dip_for(hi) > target_dip)
        throw std::runtime_error("requested dip deeper than the model allows");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (dip_for(mid) > target_dip ? lo : hi) = mid;
    }
    BackgroundSolution sol;
    sol.rho = 0.5 * (lo + hi);
    sol.achieved_dip = dip_for(sol.rho);
    return sol;
}

}  // namespace sivcav::g2
