#include "sivcav/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sivcav/constants.hpp"

namespace sivcav::pipelines {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void check_columns(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma, std::size_t min_points) {
    if (x.size() != y.size() || x.size() != sigma.size())
        throw std::invalid_argument("data columns must have equal length");
    if (x.size() < min_points) throw std::invalid_argument("too few points for this fit");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("per-point sigma must be positive");
}

}  // namespace

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             std::span<const double> sigma) {
    check_columns(x, y, sigma, 5);

    const std::size_t n = x.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> edges;
    for (std::size_t i = 0; i < edge; ++i) {
        edges.push_back(y[i]);
        edges.push_back(y[n - 1 - i]);
    }
    const double offset0 = median(edges);

    const auto peak_it = std::max_element(y.begin(), y.end());
    const std::size_t peak = static_cast<std::size_t>(peak_it - y.begin());
    const double center0 = x[peak];
    const double amplitude0 = *peak_it - offset0;

    // FWHM seed: span between the outermost half-maximum crossings.
    const double half = offset0 + 0.5 * amplitude0;
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && y[lo] > half) --lo;
    while (hi + 1 < n && y[hi] > half) ++hi;
    double fwhm0 = std::abs(x[hi] - x[lo]);
    const double span = std::abs(x[n - 1] - x[0]);
    if (!(fwhm0 > 0.0)) fwhm0 = span / 4.0;

    fit::FitProblem prob;
    prob.model_id = "lorentzian";
    prob.parameter_names = {"center", "fwhm", "amplitude", "offset"};
    prob.initial = Eigen::Vector4d(center0, fwhm0, std::max(amplitude0, 0.0), offset0);
    prob.lower = Eigen::Vector4d(x[0] - span, span * 1e-6, 0.0, -1e300);
    prob.upper = Eigen::Vector4d(x[n - 1] + span, span * 1e3, 1e300, 1e300);
    prob.x.assign(x.begin(), x.end());
    prob.y.assign(y.begin(), y.end());
    prob.sigma.assign(sigma.begin(), sigma.end());
    prob.model = [](double v, const Eigen::VectorXd& p) {
        const double h = 0.5 * p(1);
        const double d = v - p(0);
        return p(2) * h * h / (d * d + h * h) + p(3);
    };

    LorentzianFit out;
    out.result = fit::least_squares(prob);
    out.center = out.result.parameters(0);
    out.fwhm = out.result.parameters(1);
    out.amplitude = out.result.parameters(2);
    out.offset = out.result.parameters(3);

    const double noise = median(std::vector<double>(sigma.begin(), sigma.end()));
    out.peak_found = out.amplitude >= 3.0 * noise && out.result.converged;
    return out;
}

LinewidthExtrapolation zero_power_linewidth(std::span<const double> power,
                                            std::span<const double> fwhm,
                                            std::span<const double> sigma) {
    check_columns(power, fwhm, sigma, 3);
    for (double p : power)
        if (p < 0.0) throw std::invalid_argument("power must be non-negative");
    const auto [pmin, pmax] = std::minmax_element(power.begin(), power.end());
    if (!(*pmax > *pmin)) throw std::invalid_argument("powers must not all be equal");

    const double gamma00 = 0.9 * *std::min_element(fwhm.begin(), fwhm.end());
    const double broadening = *std::max_element(fwhm.begin(), fwhm.end()) / gamma00;
    const double s_max = std::max(broadening * broadening - 1.0, 0.1);
    const double p_sat0 = *pmax / s_max;

    fit::FitProblem prob;
    prob.model_id = "power-broadening";
    prob.parameter_names = {"gamma0 [Hz]", "p_sat"};
    prob.initial = Eigen::Vector2d(gamma00, p_sat0);
    prob.lower = Eigen::Vector2d(gamma00 * 1e-4, *pmax * 1e-8);
    prob.upper = Eigen::Vector2d(gamma00 * 1e4, *pmax * 1e8);
    prob.x.assign(power.begin(), power.end());
    prob.y.assign(fwhm.begin(), fwhm.end());
    prob.sigma.assign(sigma.begin(), sigma.end());
    prob.model = [](double p, const Eigen::VectorXd& q) {
        return q(0) * std::sqrt(1.0 + p / q(1));
    };

    LinewidthExtrapolation out;
    out.result = fit::least_squares(prob);
    out.gamma0 = out.result.parameters(0);
    out.gamma0_sigma = out.result.sigma(0);
    out.p_sat = out.result.parameters(1);
    out.p_sat_sigma = out.result.sigma(1);
    return out;
}

PurcellExtraction purcell_from_linewidths(std::span<const LinewidthPoint> series,
                                          const PurcellSeriesGeometry& geometry,
                                          PurcellFitMode mode, double gamma_free_fixed) {
    const std::size_t min_points = mode == PurcellFitMode::fixed_free_space ? 1 : 2;
    if (series.size() < min_points)
        throw std::invalid_argument("too few cavity lengths for this fit mode");
    if (mode == PurcellFitMode::fixed_free_space && !(gamma_free_fixed > 0.0))
        throw std::invalid_argument("fixed free-space linewidth must be positive");
    if (!(geometry.finesse > 0.0)) throw std::invalid_argument("finesse must be positive");

    // Per-order geometric rate figure f_P/penalty; the fit sees only this.
    std::vector<double> figure(series.size());
    int shortest = series.front().mode_order;
    std::size_t shortest_idx = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& pt = series[i];
        if (!(pt.fwhm > 0.0) || !(pt.sigma > 0.0))
            throw std::invalid_argument("linewidths and sigmas must be positive");
        const double length = cavity::effective_length_from_order(pt.mode_order,
                                                                  geometry.wavelength);
        cavity::CavityGeometry geom;
        geom.roc = geometry.roc;
        geom.eff_length = length;
        geom.wavelength = geometry.wavelength;
        geom.transmission_a_ppm = 1.0;  // placeholder, finesse supplied directly
        const cavity::GaussianMode gm = cavity::mode_geometry(geom, pt.mode_order);
        const cavity::CavityQuality q =
            cavity::quality_factor(geometry.finesse, length, geometry.wavelength);
        const double f_p = cavity::purcell_ideal(q.q_factor, gm.mode_volume_lambda3,
                                                 geometry.refractive_index);
        figure[i] = f_p / gm.position_penalty;
        if (pt.mode_order < shortest) {
            shortest = pt.mode_order;
            shortest_idx = i;
        }
    }

    std::vector<double> y(series.size()), s(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        y[i] = series[i].fwhm;
        s[i] = series[i].sigma;
    }

    fit::FitProblem prob;
    prob.x = figure;
    prob.y = y;
    prob.sigma = s;

    PurcellExtraction out;
    if (mode == PurcellFitMode::fixed_free_space) {
        // Linear in xi; closed-form weighted start, one LM polish step.
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const double w = 1.0 / (s[i] * s[i]);
            num += w * figure[i] * (y[i] / gamma_free_fixed - 1.0);
            den += w * figure[i] * figure[i];
        }
        if (!(den > 0.0)) throw std::invalid_argument("degenerate geometry figures");
        const double xi0 = num / den;

        prob.model_id = "purcell-linewidth-fixed";
        prob.parameter_names = {"coupling_scale"};
        prob.initial = Eigen::VectorXd::Constant(1, std::max(xi0, 0.0));
        prob.lower = Eigen::VectorXd::Constant(1, 0.0);
        const double gf = gamma_free_fixed;
        prob.model = [gf](double g, const Eigen::VectorXd& p) { return gf * (1.0 + p(0) * g); };
        out.result = fit::least_squares(prob);
        out.coupling_scale = out.result.parameters(0);
        out.gamma_free = gamma_free_fixed;
        out.gamma_free_sigma = 0.0;
        out.purcell_shortest = 1.0 + out.coupling_scale * figure[shortest_idx];
        out.purcell_sigma = figure[shortest_idx] * out.result.sigma(0);
    } else {
        const std::size_t a = 0, b = series.size() - 1;
        double gf0 = (y[a] * figure[b] - y[b] * figure[a]) /
                     std::max(figure[b] - figure[a], 1e-300);
        if (!(gf0 > 0.0)) gf0 = 0.5 * *std::min_element(y.begin(), y.end());
        const double xi0 = std::max((y[a] / gf0 - 1.0) / std::max(figure[a], 1e-300), 0.0);

        prob.model_id = "purcell-linewidth-free";
        prob.parameter_names = {"gamma_free [Hz]", "coupling_scale"};
        prob.initial = Eigen::Vector2d(gf0, xi0);
        prob.lower = Eigen::Vector2d(1.0, 0.0);
        prob.model = [](double g, const Eigen::VectorXd& p) { return p(0) * (1.0 + p(1) * g); };
        out.result = fit::least_squares(prob);
        out.gamma_free = out.result.parameters(0);
        out.gamma_free_sigma = out.result.sigma(0);
        out.coupling_scale = out.result.parameters(1);
        out.purcell_shortest = 1.0 + out.coupling_scale * figure[shortest_idx];
        out.purcell_sigma = figure[shortest_idx] * out.result.sigma(1);
    }
    return out;
}

double lifetime_linewidth_bridge(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("value must be positive");
    return 1.0 / (constants::two_pi * value);
}

double dc_sensitivity(double sigma_splitting_hz, double slope_hz_per_t,
                      double acquisition_time_s) {
    if (!(slope_hz_per_t > 0.0)) throw std::invalid_argument("splitting slope must be positive");
    if (!(sigma_splitting_hz > 0.0) || !std::isfinite(sigma_splitting_hz))
        throw std::invalid_argument("splitting uncertainty must be positive and finite");
    if (!(acquisition_time_s > 0.0))
        throw std::invalid_argument("acquisition time must be positive");
    return sigma_splitting_hz / slope_hz_per_t * std::sqrt(acquisition_time_s);
}

G2HistogramFit fit_g2_histogram(const g2::Histogram& histogram, double rho) {
    if (histogram.tau.size() != histogram.counts.size())
        throw std::invalid_argument("histogram size mismatch");
    if (histogram.tau.size() < 8) throw std::invalid_argument("histogram too short to fit");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");

    const std::size_t n = histogram.tau.size();
    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(std::max(histogram.counts[i], 1.0));

    const std::size_t tail_start = n - std::max<std::size_t>(1, n / 5);
    double norm0 = 0.0;
    for (std::size_t i = tail_start; i < n; ++i) norm0 += histogram.counts[i];
    norm0 /= static_cast<double>(n - tail_start);
    norm0 = std::max(norm0, 1e-6);

    const double span = histogram.tau.back() - histogram.tau.front();
    const double step = span / static_cast<double>(n - 1);
    const double rho2 = rho * rho;

    const auto model_value = [rho2](double t, const Eigen::VectorXd& p) {
        const double gamma = 1.0 / p(0);
        const double omega = constants::two_pi * p(1);
        const double env = 0.75 * gamma;
        const double disc = omega * omega - 0.0625 * gamma * gamma;
        double bracket;
        if (disc > 0.0) {
            const double mu = std::sqrt(disc);
            bracket = std::cos(mu * t) + env / mu * std::sin(mu * t);
        } else if (disc < 0.0) {
            const double nu = std::sqrt(-disc);
            bracket = std::cosh(nu * t) + env / nu * std::sinh(nu * t);
        } else {
            bracket = 1.0 + env * t;
        }
        const double ideal = 1.0 - std::exp(-env * t) * bracket;
        return p(2) * (1.0 + rho2 * (ideal - 1.0));
    };

    // Deterministic coarse scan over the Rabi frequency; the oscillatory
    // chi-squared landscape traps a single-start descent otherwise.
    const double f_lo = 0.25 / span;
    const double f_hi = 0.25 / step;
    const double tau0 = span / 10.0;
    double best_f = f_lo, best_chi2 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 96; ++k) {
        const double f = f_lo * std::pow(f_hi / f_lo, k / 95.0);
        Eigen::Vector3d p(tau0, f, norm0);
        double chi2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = (model_value(histogram.tau[i], p) - histogram.counts[i]) / sigma[i];
            chi2 += r * r;
        }
        if (chi2 < best_chi2) {
            best_chi2 = chi2;
            best_f = f;
        }
    }

    fit::FitProblem prob;
    prob.model_id = "g2-resonant";
    prob.parameter_names = {"lifetime [s]", "rabi/2pi [Hz]", "norm [counts]"};
    prob.initial = Eigen::Vector3d(tau0, best_f, norm0);
    prob.lower = Eigen::Vector3d(step * 1e-3, f_lo * 1e-3, 1e-9);
    prob.upper = Eigen::Vector3d(span * 1e3, f_hi * 1e3, 1e300);
    prob.x = histogram.tau;
    prob.y = histogram.counts;
    prob.sigma = sigma;
    prob.model = model_value;

    G2HistogramFit out;
    out.result = fit::least_squares(prob);
    out.lifetime = out.result.parameters(0);
    out.lifetime_sigma = out.result.sigma(0);
    out.rabi_over_2pi = out.result.parameters(1);
    out.rabi_sigma = out.result.sigma(1);
    out.norm = out.result.parameters(2);
    return out;
}

SaturationFit fit_saturation(std::span<const double> power, std::span<const double> rate,
                             std::span<const double> sigma) {
    check_columns(power, rate, sigma, 4);
    const double r_max = *std::max_element(rate.begin(), rate.end());
    const double r_min = *std::min_element(rate.begin(), rate.end());
    const double p_max = *std::max_element(power.begin(), power.end());
    if (!(p_max > 0.0)) throw std::invalid_argument("need a nonzero power point");

    const double bg0 = std::max(r_min, 0.0);
    const double rinf0 = std::max(r_max - bg0, 1e-6);
    const double half_level = bg0 + 0.5 * rinf0;
    double p_sat0 = 0.5 * p_max;
    for (std::size_t i = 0; i < rate.size(); ++i) {
        if (rate[i] >= half_level && power[i] > 0.0) {
            p_sat0 = power[i];
            break;
        }
    }

    fit::FitProblem prob;
    prob.model_id = "saturation";
    prob.parameter_names = {"r_inf [counts/s]", "p_sat", "background [counts/s]"};
    prob.initial = Eigen::Vector3d(rinf0, p_sat0, bg0);
    prob.lower = Eigen::Vector3d(0.0, p_max * 1e-8, 0.0);
    prob.upper = Eigen::Vector3d(1e300, p_max * 1e8, 1e300);
    prob.x.assign(power.begin(), power.end());
    prob.y.assign(rate.begin(), rate.end());
    prob.sigma.assign(sigma.begin(), sigma.end());
    prob.model = [](double p, const Eigen::VectorXd& q) {
        const double s = p / q(1);
        return q(0) * s / (1.0 + s) + q(2);
    };

    SaturationFit out;
    out.result = fit::least_squares(prob);
    out.r_inf = out.result.parameters(0);
    out.r_inf_sigma = out.result.sigma(0);
    out.p_sat = out.result.parameters(1);
    out.p_sat_sigma = out.result.sigma(1);
    out.background = out.result.parameters(2);
    out.background_sigma = out.result.sigma(2);
    return out;
}

}  // namespace sivcav::pipelines
