#pragma once

#include <vector>

namespace sivcav::cavity {

// Hemispherical Fabry-Perot geometry. Lengths in meters, losses in ppm per
// round trip. eff_length is the effective mirror separation (field
// penetration into the coatings absorbed into it).
struct CavityGeometry {
    double roc = 0.0;
    double eff_length = 0.0;
    double wavelength = 0.0;
    double transmission_a_ppm = 0.0;
    double transmission_b_ppm = 0.0;
    double excess_loss_ppm = 0.0;
};

// Throws std::invalid_argument on a violated invariant.
void validate(const CavityGeometry& geom);

// Fundamental Gaussian mode of the hemispherical resonator. The emitter sits
// on the curved mirror, where the beam is wider than at the flat-mirror
// waist; position_penalty = (w(L)/w0)^2 is the resulting coupling reduction.
struct GaussianMode {
    int order = 0;
    double waist_flat = 0.0;           // w0 on the flat mirror [m]
    double waist_curved = 0.0;         // w(L) on the curved mirror [m]
    double rayleigh_range = 0.0;       // [m]
    double mode_volume_m3 = 0.0;
    double mode_volume_lambda3 = 0.0;  // same volume in wavelength-cubed units
    double position_penalty = 1.0;
};

struct CavityQuality {
    double finesse = 0.0;
    double fsr = 0.0;               // c / 2L [Hz]
    double cavity_linewidth = 0.0;  // FSR / finesse [Hz]
    double q_factor = 0.0;
};

struct EmitterCouplingParams {
    double branching_offres = 0.325;   // fraction decaying through the addressed line
    double quantum_efficiency = 1.0;
    double dipole_overlap = 1.0;
    double refractive_index = 1.0;
};

void validate(const EmitterCouplingParams& coupling);

struct PurcellEstimate {
    double f_p_ideal = 0.0;       // bare cavity figure, before emitter factors
    double purcell_flat = 1.0;    // lifetime ratio for an emitter at the waist
    double purcell_curved = 1.0;  // same emitter on the curved mirror
    double beta = 0.0;            // fraction emitted into the mode, curved case
};

// Finesse from per-mirror transmissions plus round-trip excess loss,
// F = 2*pi / total loss (low-loss limit). Throws on zero total loss.
double finesse_from_losses(double t_a_ppm, double t_b_ppm, double excess_ppm);

// Planar resonance condition lambda_n = 2L/n, solved for L.
double effective_length_from_order(int order, double wavelength);

struct ModeOrderResult {
    int order = 0;
    double residual = 0.0;  // | lambda_long/lambda_short - n/(n-1) |
    bool flagged = false;   // residual above tolerance
};

// Infer the longitudinal mode order n from two adjacent fundamental modes
// (orders n-1 and n) observed at the same length.
ModeOrderResult infer_mode_order(double lambda_long, double lambda_short,
                                 double residual_tolerance = 0.05);

// Gaussian-beam mode of the stable hemispherical cavity:
//   w0^2   = (lambda/pi) sqrt(L(RoC-L))
//   z_R    = pi w0^2 / lambda
//   w(L)^2 = w0^2 (1 + (L/z_R)^2)
//   V      = (pi/4) L w0^2
// Throws std::domain_error("unstable resonator") when L >= RoC.
GaussianMode mode_geometry(const CavityGeometry& geom, int order);

CavityQuality quality_factor(double finesse, double eff_length, double wavelength);

// f_P = 3/(4 pi^2) (lambda/n)^3 Q/V with V in lambda^3 units.
double purcell_ideal(double q, double mode_volume_lambda3, double refractive_index);

// Same figure evaluated dimensionally, V in m^3. Cross-checks the above.
double purcell_ideal_si(double q, double mode_volume_m3, double wavelength,
                        double refractive_index);

// F_P = 1 + xi * QE * overlap * f_P / penalty. The flat-mirror value
// (penalty = 1) is reported alongside, plus beta for the curved case.
PurcellEstimate purcell_effective(double f_p_ideal, const EmitterCouplingParams& coupling,
                                  double position_penalty);

// Lifetime-ratio identity for moving an emitter from the waist to the curved
// mirror: F_curv = 1 + (F_flat - 1) / penalty.
double purcell_curved_from_flat(double purcell_flat, double position_penalty);

// beta = (F_P - 1)/F_P. Throws for F_P < 1.
double beta_factor(double purcell);

// Rescale an effective Purcell factor to a different finesse; the coupled
// part (F_P - 1) is linear in finesse at fixed geometry.
PurcellEstimate scale_purcell_with_finesse(double f_p_ref, double finesse_ref,
                                           double finesse_new);

// Length excursion that detunes the resonance by one cavity linewidth,
// dL = lambda / (2 F).
double length_stability_bound(double finesse, double wavelength);

// Everything the CLI emits as one "cavity report" record.
struct CavityReport {
    CavityGeometry geometry;
    double finesse = 0.0;
    EmitterCouplingParams coupling;
    GaussianMode mode;
    CavityQuality quality;
    PurcellEstimate purcell;
};

// Full forward model for one mode order: length from the resonance
// condition, then geometry, quality and Purcell figures.
CavityReport cavity_report(const CavityGeometry& geom, int order,
                           const EmitterCouplingParams& coupling,
                           double finesse_override = 0.0);

}  // namespace sivcav::cavity
