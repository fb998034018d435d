#pragma once

#include <span>
#include <vector>

#include "sivcav/cavity.hpp"
#include "sivcav/fit.hpp"
#include "sivcav/g2.hpp"

namespace sivcav::pipelines {

struct LorentzianFit {
    double center = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    bool peak_found = false;  // cleared when no peak rises 3 sigma above baseline
    fit::FitResult result;
};

// Peak-plus-offset Lorentzian line fit. Start values come from a documented
// heuristic: center at the maximum bin, offset from the outer-bin median,
// amplitude = max - offset, FWHM from the half-maximum crossing span.
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             std::span<const double> sigma);

struct LinewidthExtrapolation {
    double gamma0 = 0.0;  // [Hz]
    double gamma0_sigma = 0.0;
    double p_sat = 0.0;
    double p_sat_sigma = 0.0;
    fit::FitResult result;
};

// gamma(P) = gamma0 sqrt(1 + P/P_sat) through (power, fwhm) points; the
// intercept is the zero-power homogeneous linewidth.
LinewidthExtrapolation zero_power_linewidth(std::span<const double> power,
                                            std::span<const double> fwhm,
                                            std::span<const double> sigma);

struct LinewidthPoint {
    int mode_order = 0;
    double fwhm = 0.0;   // [Hz]
    double sigma = 0.0;  // [Hz]
};

// Geometry shared by all points of a linewidth-vs-length series.
struct PurcellSeriesGeometry {
    double roc = 0.0;         // [m]
    double wavelength = 0.0;  // [m]
    double finesse = 0.0;
    double refractive_index = 1.0;
};

enum class PurcellFitMode {
    fixed_free_space,  // gamma_free supplied, coupling scale fitted
    free_free_space,   // both fitted
};

struct PurcellExtraction {
    double purcell_shortest = 0.0;  // lifetime ratio at the shortest length
    double purcell_sigma = 0.0;
    double gamma_free = 0.0;  // [Hz]
    double gamma_free_sigma = 0.0;
    double coupling_scale = 0.0;  // fitted multiplier on the ideal rate figure
    fit::FitResult result;
};

// Linewidth-vs-length model gamma(L) = gamma_free (1 + xi f_P(L)/penalty(L)).
// The precomputed per-order figure f_P/penalty comes from the cavity
// geometry; xi soaks up quantum efficiency, branching and dipole overlap.
// Fixed mode accepts a single length (ratio identity); free mode needs >= 2.
PurcellExtraction purcell_from_linewidths(std::span<const LinewidthPoint> series,
                                          const PurcellSeriesGeometry& geometry,
                                          PurcellFitMode mode, double gamma_free_fixed = 0.0);

// Fourier-limit conversion gamma = 1/(2 pi tau); its own inverse.
double lifetime_linewidth_bridge(double value);

// eta = sigma_B sqrt(T), sigma_B = sigma(splitting) / slope.
double dc_sensitivity(double sigma_splitting_hz, double slope_hz_per_t,
                      double acquisition_time_s);

struct G2HistogramFit {
    double lifetime = 0.0;  // 1/Gamma [s]
    double lifetime_sigma = 0.0;
    double rabi_over_2pi = 0.0;  // [Hz]
    double rabi_sigma = 0.0;
    double norm = 0.0;  // counts at large delay
    fit::FitResult result;
};

// Fit the resonant correlation model to a coincidence histogram. The signal
// fraction rho is held fixed (1 = background-free); the timing response is
// not part of the fit model. Rabi frequency is seeded by a deterministic
// grid scan, so no user initial guess is needed.
G2HistogramFit fit_g2_histogram(const g2::Histogram& histogram, double rho = 1.0);

struct SaturationFit {
    double r_inf = 0.0;  // [counts/s]
    double r_inf_sigma = 0.0;
    double p_sat = 0.0;
    double p_sat_sigma = 0.0;
    double background = 0.0;
    double background_sigma = 0.0;
    fit::FitResult result;
};

// R(P) = R_inf (P/P_sat)/(1 + P/P_sat) + background.
SaturationFit fit_saturation(std::span<const double> power, std::span<const double> rate,
                             std::span<const double> sigma);

}  // namespace sivcav::pipelines
