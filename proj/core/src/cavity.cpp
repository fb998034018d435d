#include "sivcav/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "sivcav/constants.hpp"

namespace sivcav::cavity {

using constants::c_light;
using constants::pi;

void validate(const CavityGeometry& geom) {
    if (!(geom.wavelength > 0.0))
        throw std::invalid_argument("cavity geometry: wavelength must be positive");
    if (!(geom.roc > 0.0))
        throw std::invalid_argument("cavity geometry: radius of curvature must be positive");
    if (!(geom.eff_length > 0.0) || geom.eff_length >= geom.roc)
        throw std::invalid_argument(
            "cavity geometry: effective length must satisfy 0 < L < RoC");
    if (geom.transmission_a_ppm < 0.0 || geom.transmission_b_ppm < 0.0 ||
        geom.excess_loss_ppm < 0.0)
        throw std::invalid_argument("cavity geometry: losses must be non-negative");
}

void validate(const EmitterCouplingParams& coupling) {
    auto unit_interval = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit_interval(coupling.branching_offres))
        throw std::invalid_argument("coupling: branching ratio must lie in [0,1]");
    if (!unit_interval(coupling.quantum_efficiency))
        throw std::invalid_argument("coupling: quantum efficiency must lie in [0,1]");
    if (!unit_interval(coupling.dipole_overlap))
        throw std::invalid_argument("coupling: dipole overlap must lie in [0,1]");
    if (!(coupling.refractive_index >= 1.0))
        throw std::invalid_argument("coupling: refractive index must be >= 1");
}

double finesse_from_losses(double t_a_ppm, double t_b_ppm, double excess_ppm) {
    if (t_a_ppm < 0.0 || t_b_ppm < 0.0 || excess_ppm < 0.0)
        throw std::invalid_argument("finesse_from_losses: losses must be non-negative");
    const double total = (t_a_ppm + t_b_ppm + excess_ppm) * 1e-6;
    if (total <= 0.0)
        throw std::invalid_argument("lossless cavity undefined");
    return 2.0 * pi / total;
}

double effective_length_from_order(int order, double wavelength) {
    if (order < 1)
        throw std::invalid_argument("effective_length_from_order: order must be >= 1");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("effective_length_from_order: wavelength must be positive");
    return 0.5 * static_cast<double>(order) * wavelength;
}

ModeOrderResult infer_mode_order(double lambda_long, double lambda_short,
                                 double residual_tolerance) {
    if (!(lambda_short > 0.0) || !(lambda_long > lambda_short))
        throw std::invalid_argument(
            "infer_mode_order: requires lambda_long > lambda_short > 0");
    const double n_est = lambda_long / (lambda_long - lambda_short);
    ModeOrderResult result;
    result.order = static_cast<int>(std::lround(n_est));
    if (result.order < 2) result.order = 2;  // adjacent pair needs n-1 >= 1
    const double ratio = lambda_long / lambda_short;
    const double ideal = static_cast<double>(result.order) /
                         static_cast<double>(result.order - 1);
    result.residual = std::abs(ratio - ideal);
    result.flagged = result.residual > residual_tolerance;
    return result;
}

GaussianMode mode_geometry(const CavityGeometry& geom, int order) {
    if (!(geom.wavelength > 0.0) || !(geom.roc > 0.0) || !(geom.eff_length > 0.0))
        throw std::invalid_argument("mode_geometry: lengths must be positive");
    const double length = geom.eff_length;
    if (length >= geom.roc) throw std::domain_error("unstable resonator");

    const double lambda = geom.wavelength;
    GaussianMode mode;
    mode.order = order;
    const double w0_sq = (lambda / pi) * std::sqrt(length * (geom.roc - length));
    const double z_r = pi * w0_sq / lambda;
    const double penalty = 1.0 + (length / z_r) * (length / z_r);
    mode.waist_flat = std::sqrt(w0_sq);
    mode.rayleigh_range = z_r;
    mode.position_penalty = penalty;
    mode.waist_curved = std::sqrt(w0_sq * penalty);
    mode.mode_volume_m3 = 0.25 * pi * length * w0_sq;
    mode.mode_volume_lambda3 = mode.mode_volume_m3 / (lambda * lambda * lambda);
    return mode;
}

CavityQuality quality_factor(double finesse, double eff_length, double wavelength) {
    if (!(finesse > 0.0))
        throw std::invalid_argument("quality_factor: finesse must be positive");
    if (!(eff_length > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("quality_factor: lengths must be positive");
    CavityQuality quality;
    quality.finesse = finesse;
    quality.fsr = c_light / (2.0 * eff_length);
    quality.cavity_linewidth = quality.fsr / finesse;
    quality.q_factor = (c_light / wavelength) / quality.cavity_linewidth;
    return quality;
}

double purcell_ideal(double q, double mode_volume_lambda3, double refractive_index) {
    if (!(q > 0.0) || !(mode_volume_lambda3 > 0.0))
        throw std::invalid_argument("purcell_ideal: Q and V must be positive");
    const double n3 = refractive_index * refractive_index * refractive_index;
    return 3.0 / (4.0 * pi * pi) * q / (n3 * mode_volume_lambda3);
}

double purcell_ideal_si(double q, double mode_volume_m3, double wavelength,
                        double refractive_index) {
    if (!(q > 0.0) || !(mode_volume_m3 > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("purcell_ideal_si: Q, V and lambda must be positive");
    const double lam_over_n = wavelength / refractive_index;
    return 3.0 / (4.0 * pi * pi) * lam_over_n * lam_over_n * lam_over_n * q /
           mode_volume_m3;
}

PurcellEstimate purcell_effective(double f_p_ideal, const EmitterCouplingParams& coupling,
                                  double position_penalty) {
    validate(coupling);
    if (!(f_p_ideal >= 0.0))
        throw std::invalid_argument("purcell_effective: f_P must be non-negative");
    if (!(position_penalty >= 1.0))
        throw std::invalid_argument("purcell_effective: position penalty must be >= 1");
    PurcellEstimate est;
    est.f_p_ideal = f_p_ideal;
    const double scale = coupling.branching_offres * coupling.quantum_efficiency *
                         coupling.dipole_overlap;
    est.purcell_flat = 1.0 + scale * f_p_ideal;
    est.purcell_curved = 1.0 + scale * f_p_ideal / position_penalty;
    est.beta = beta_factor(est.purcell_curved);
    return est;
}

double purcell_curved_from_flat(double purcell_flat, double position_penalty) {
    if (!(purcell_flat >= 1.0))
        throw std::invalid_argument("purcell_curved_from_flat: F_P must be >= 1");
    if (!(position_penalty >= 1.0))
        throw std::invalid_argument("purcell_curved_from_flat: penalty must be >= 1");
    return 1.0 + (purcell_flat - 1.0) / position_penalty;
}

double beta_factor(double purcell) {
    if (purcell < 1.0)
        throw std::invalid_argument("beta_factor: Purcell factor must be >= 1");
    return (purcell - 1.0) / purcell;
}

PurcellEstimate scale_purcell_with_finesse(double f_p_ref, double finesse_ref,
                                           double finesse_new) {
    if (!(f_p_ref >= 1.0))
        throw std::invalid_argument("scale_purcell_with_finesse: F_P must be >= 1");
    if (!(finesse_ref > 0.0) || !(finesse_new > 0.0))
        throw std::invalid_argument("scale_purcell_with_finesse: finesse must be positive");
    PurcellEstimate est;
    est.purcell_curved = 1.0 + (f_p_ref - 1.0) * (finesse_new / finesse_ref);
    est.purcell_flat = est.purcell_curved;
    est.f_p_ideal = 0.0;  // not derivable from the ratio alone
    est.beta = beta_factor(est.purcell_curved);
    return est;
}

double length_stability_bound(double finesse, double wavelength) {
    if (!(finesse > 0.0))
        throw std::invalid_argument("length_stability_bound: finesse must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("length_stability_bound: wavelength must be positive");
    return wavelength / (2.0 * finesse);
}

CavityReport cavity_report(const CavityGeometry& geom, int order,
                           const EmitterCouplingParams& coupling,
                           double finesse_override) {
    CavityReport report;
    report.geometry = geom;
    report.geometry.eff_length = effective_length_from_order(order, geom.wavelength);
    validate(report.geometry);
    validate(coupling);
    report.coupling = coupling;
    report.finesse = finesse_override > 0.0
                         ? finesse_override
                         : finesse_from_losses(geom.transmission_a_ppm,
                                               geom.transmission_b_ppm,
                                               geom.excess_loss_ppm);
    report.mode = mode_geometry(report.geometry, order);
    report.quality = quality_factor(report.finesse, report.geometry.eff_length,
                                    geom.wavelength);
    const double f_p = purcell_ideal(report.quality.q_factor,
                                     report.mode.mode_volume_lambda3,
                                     coupling.refractive_index);
    report.purcell = purcell_effective(f_p, coupling, report.mode.position_penalty);
    return report;
}

}  // namespace sivcav::cavity
