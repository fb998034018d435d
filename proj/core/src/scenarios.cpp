#include "sivcav/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sivcav/cavity.hpp"
#include "sivcav/constants.hpp"
#include "sivcav/g2.hpp"
#include "sivcav/levels.hpp"
#include "sivcav/pipelines.hpp"
#include "sivcav/ple.hpp"
#include "sivcav/report.hpp"
#include "sivcav/rng.hpp"
#include "sivcav/spin_pump.hpp"
#include "sivcav/table_io.hpp"

namespace sivcav::scenarios {

namespace {

using nlohmann::json;

// Fit did not converge: exit code 3 instead of the validation code 2.
struct FitFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void missing(const std::string& path) {
    throw std::invalid_argument("config field missing or mistyped: " + path);
}

const json& require_block(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_object()) missing(ctx + key);
    return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) missing(ctx + key);
    return j.at(key).get<double>();
}

double optional_number(const json& j, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    if (!j.at(key).is_number()) missing(key);
    return j.at(key).get<double>();
}

std::int64_t require_integer(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number_integer()) missing(ctx + key);
    return j.at(key).get<std::int64_t>();
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) missing(ctx + key);
    return j.at(key).get<std::string>();
}

std::vector<double> require_number_array(const json& j, const std::string& key,
                                         const std::string& ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) missing(ctx + key);
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) missing(ctx + key);
        out.push_back(v.get<double>());
    }
    if (out.empty()) missing(ctx + key);
    return out;
}

struct Sink {
    std::filesystem::path dir;
    Format format = Format::document;
    std::vector<std::filesystem::path>* files = nullptr;

    void table(const std::string& name, const io::Table& t) const {
        const auto path = dir / name;
        io::write_table(path, t);
        files->push_back(path);
    }

    void document(const std::string& base, const report::Document& doc) const {
        const auto path = dir / (base + (format == Format::document ? ".json" : ".txt"));
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out << (format == Format::document ? doc.to_json() : doc.to_text());
        if (!out) throw std::runtime_error("write failed: " + path.string());
        files->push_back(path);
    }
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

std::string format_seed(std::uint64_t seed) { return std::to_string(seed); }

// ---------------------------------------------------------------- scenarios

void run_cavity_report(const json& cfg, const Sink& sink, report::Document& doc) {
    const json& c = require_block(cfg, "cavity", "");
    cavity::CavityGeometry geom;
    geom.roc = require_number(c, "roc_m", "cavity.");
    geom.wavelength = require_number(c, "wavelength_m", "cavity.");
    geom.transmission_a_ppm = optional_number(c, "transmission_a_ppm", 0.0);
    geom.transmission_b_ppm = optional_number(c, "transmission_b_ppm", 0.0);
    geom.excess_loss_ppm = optional_number(c, "excess_loss_ppm", 0.0);
    const double finesse_override = optional_number(c, "finesse", 0.0);

    cavity::EmitterCouplingParams coupling;
    if (cfg.contains("coupling")) {
        const json& k = require_block(cfg, "coupling", "");
        coupling.branching_offres = optional_number(k, "branching_offres", coupling.branching_offres);
        coupling.quantum_efficiency =
            optional_number(k, "quantum_efficiency", coupling.quantum_efficiency);
        coupling.dipole_overlap = optional_number(k, "dipole_overlap", coupling.dipole_overlap);
        coupling.refractive_index =
            optional_number(k, "refractive_index", coupling.refractive_index);
    }

    if (!cfg.contains("orders") || !cfg.at("orders").is_array() || cfg.at("orders").empty())
        missing("orders");

    io::Table modes;
    modes.column_names = {"order",       "eff_length_m",  "waist_flat_m", "waist_curved_m",
                          "penalty",     "volume_lambda3", "q_factor",    "fsr_hz",
                          "linewidth_hz", "purcell_flat",  "purcell_curved", "beta"};
    modes.columns.assign(modes.column_names.size(), {});

    bool first = true;
    for (const auto& o : cfg.at("orders")) {
        if (!o.is_number_integer()) missing("orders");
        const int order = o.get<int>();
        const cavity::CavityReport rep =
            cavity::cavity_report(geom, order, coupling, finesse_override);
        std::size_t c_i = 0;
        modes.columns[c_i++].push_back(order);
        modes.columns[c_i++].push_back(rep.geometry.eff_length);
        modes.columns[c_i++].push_back(rep.mode.waist_flat);
        modes.columns[c_i++].push_back(rep.mode.waist_curved);
        modes.columns[c_i++].push_back(rep.mode.position_penalty);
        modes.columns[c_i++].push_back(rep.mode.mode_volume_lambda3);
        modes.columns[c_i++].push_back(rep.quality.q_factor);
        modes.columns[c_i++].push_back(rep.quality.fsr);
        modes.columns[c_i++].push_back(rep.quality.cavity_linewidth);
        modes.columns[c_i++].push_back(rep.purcell.purcell_flat);
        modes.columns[c_i++].push_back(rep.purcell.purcell_curved);
        modes.columns[c_i++].push_back(rep.purcell.beta);

        if (first) {
            doc.set("finesse", rep.finesse);
            doc.set("stability_bound_m",
                    cavity::length_stability_bound(rep.finesse, geom.wavelength));
            first = false;
        }
        auto& sec = doc.section("order_" + std::to_string(order));
        sec.set("eff_length_m", rep.geometry.eff_length);
        sec.set("q_factor", rep.quality.q_factor);
        sec.set("volume_lambda3", rep.mode.mode_volume_lambda3);
        sec.set("waist_flat_m", rep.mode.waist_flat);
        sec.set("waist_curved_m", rep.mode.waist_curved);
        sec.set("position_penalty", rep.mode.position_penalty);
        sec.set("purcell_flat", rep.purcell.purcell_flat);
        sec.set("purcell_curved", rep.purcell.purcell_curved);
        sec.set("beta", rep.purcell.beta);
    }
    modes.metadata["kind"] = "cavity-modes";
    sink.table("cavity_modes.dat", modes);
}

void run_modes_infer(const json& cfg, const Sink& sink, report::Document& doc) {
    const json& m = require_block(cfg, "modes", "");
    const double lambda_long = require_number(m, "lambda_long_m", "modes.");
    const double lambda_short = require_number(m, "lambda_short_m", "modes.");
    const double tolerance = optional_number(m, "tolerance", 0.05);

    const cavity::ModeOrderResult r =
        cavity::infer_mode_order(lambda_long, lambda_short, tolerance);
    doc.set("order", static_cast<std::int64_t>(r.order));
    doc.set("residual", r.residual);
    doc.set("flagged", r.flagged);
    doc.set("eff_length_m", cavity::effective_length_from_order(r.order, lambda_short));
    (void)sink;
}

void run_ple(const json& cfg, std::uint64_t seed, const Sink& sink, report::Document& doc) {
    const json& p = require_block(cfg, "ple", "");
    ple::PleModel model;
    model.zero_power_fwhm = require_number(p, "zero_power_fwhm_hz", "ple.");
    model.saturation_power = require_number(p, "saturation_power", "ple.");
    model.max_count_rate = require_number(p, "max_count_rate", "ple.");
    model.background_rate = optional_number(p, "background_rate", 0.0);
    const double center = optional_number(p, "line_center_hz", 0.0);
    const double span = require_number(p, "scan_span_hz", "ple.");
    const auto points = static_cast<std::size_t>(require_integer(p, "scan_points", "ple."));
    const double dwell = require_number(p, "dwell_s", "ple.");
    const std::vector<double> powers = require_number_array(p, "powers", "ple.");
    if (points < 5) missing("ple.scan_points");

    const std::vector<double> grid = linspace(center - 0.5 * span, center + 0.5 * span, points);

    std::vector<double> fit_power, fit_fwhm, fit_sigma;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        const std::uint64_t sub = rng::mix64(seed ^ rng::mix64(i));
        const ple::Spectrum spec = ple::simulate_scan(model, center, grid, powers[i], dwell, sub);

        io::Table t;
        t.column_names = {"frequency_hz", "rate_cps", "sigma_cps"};
        t.columns = {spec.frequency, spec.rate, spec.sigma};
        t.metadata = spec.metadata;
        t.metadata["kind"] = "ple-scan";
        char name[64];
        std::snprintf(name, sizeof name, "ple_scan_%02zu.dat", i);
        sink.table(name, t);

        const pipelines::LorentzianFit lf =
            pipelines::fit_lorentzian(spec.frequency, spec.rate, spec.sigma);
        if (!lf.result.converged) throw FitFailure("line fit did not converge (power index " +
                                                   std::to_string(i) + ")");
        fit_power.push_back(powers[i]);
        fit_fwhm.push_back(lf.fwhm);
        fit_sigma.push_back(std::max(lf.result.sigma(1), 1.0));
    }

    io::Table lw;
    lw.column_names = {"power", "fwhm_hz", "sigma_hz"};
    lw.columns = {fit_power, fit_fwhm, fit_sigma};
    lw.metadata["kind"] = "ple-linewidths";
    lw.metadata["seed"] = format_seed(seed);
    sink.table("ple_linewidths.dat", lw);

    const pipelines::LinewidthExtrapolation ex =
        pipelines::zero_power_linewidth(fit_power, fit_fwhm, fit_sigma);
    if (!ex.result.converged) throw FitFailure("zero-power extrapolation did not converge");
    doc.set("gamma0_hz", ex.gamma0);
    doc.set("gamma0_sigma_hz", ex.gamma0_sigma);
    doc.set("p_sat", ex.p_sat);
    doc.set("p_sat_sigma", ex.p_sat_sigma);
    doc.set("reduced_chi2", ex.result.reduced_chi2);
}

void run_g2(const json& cfg, std::uint64_t seed, const Sink& sink, report::Document& doc) {
    const json& g = require_block(cfg, "g2", "");
    qdyn::TwoLevelParams params;
    params.decay_rate = 1.0 / require_number(g, "lifetime_s", "g2.");
    params.rabi_frequency = constants::two_pi * require_number(g, "rabi_over_2pi_hz", "g2.");
    params.detuning = optional_number(g, "detuning_hz", 0.0);
    params.pure_dephasing = optional_number(g, "pure_dephasing_hz", 0.0);
    const double sb = optional_number(g, "signal_to_background", -1.0);  // <0: clean
    const double irf = optional_number(g, "irf_fwhm_s", 0.0);
    const double tau_max = require_number(g, "tau_max_s", "g2.");
    const auto points = static_cast<std::size_t>(require_integer(g, "points", "g2."));
    if (points < 8) missing("g2.points");

    const std::vector<double> tau = linspace(0.0, tau_max, points);
    const g2::CorrelationTrace ideal = g2::g2_analytic(params, tau);
    const double sb_eff = sb < 0.0 ? 1e12 : sb;
    const g2::CorrelationTrace meas = g2::g2_measured(ideal, sb_eff, irf);

    // Detector histograms are symmetric in delay: mirror to negative tau.
    io::Table trace;
    trace.column_names = {"tau_s", "g2_ideal", "g2_measured"};
    trace.columns.assign(3, {});
    for (std::size_t i = points; i-- > 1;) {
        trace.columns[0].push_back(-tau[i]);
        trace.columns[1].push_back(ideal.g2[i]);
        trace.columns[2].push_back(meas.g2[i]);
    }
    for (std::size_t i = 0; i < points; ++i) {
        trace.columns[0].push_back(tau[i]);
        trace.columns[1].push_back(ideal.g2[i]);
        trace.columns[2].push_back(meas.g2[i]);
    }
    trace.metadata["kind"] = "g2-trace";
    trace.metadata["irf_fwhm_s"] = std::to_string(irf);
    sink.table("g2_trace.dat", trace);

    if (optional_number(g, "solve_dip", -1.0) >= 0.0) {
        const double target = g.at("solve_dip").get<double>();
        const g2::BackgroundSolution sol =
            g2::solve_background_ratio(params, irf, target, tau_max, static_cast<int>(points));
        auto& sec = doc.section("background_solution");
        sec.set("target_dip", target);
        sec.set("rho", sol.rho);
        sec.set("achieved_dip", sol.achieved_dip);
    }

    const double counts_scale = optional_number(g, "counts_scale", 0.0);
    if (counts_scale > 0.0) {
        const g2::Histogram hist =
            g2::simulate_histogram(params, sb_eff, irf, tau, counts_scale, seed);
        io::Table h;
        h.column_names = {"tau_s", "counts"};
        h.columns = {hist.tau, hist.counts};
        h.metadata["kind"] = "g2-histogram";
        h.metadata["seed"] = format_seed(seed);
        h.metadata["counts_scale"] = std::to_string(counts_scale);
        sink.table("g2_histogram.dat", h);

        const double rho = sb < 0.0 ? 1.0 : sb / (1.0 + sb);
        const pipelines::G2HistogramFit fit = pipelines::fit_g2_histogram(hist, rho);
        if (!fit.result.converged) throw FitFailure("correlation fit did not converge");
        auto& sec = doc.section("fit");
        sec.set("lifetime_s", fit.lifetime);
        sec.set("lifetime_sigma_s", fit.lifetime_sigma);
        sec.set("rabi_over_2pi_hz", fit.rabi_over_2pi);
        sec.set("rabi_sigma_hz", fit.rabi_sigma);
        sec.set("norm_counts", fit.norm);
        sec.set("reduced_chi2", fit.result.reduced_chi2);
    }

    doc.set("dip_measured", *std::min_element(meas.g2.begin(), meas.g2.end()));
}

levels::BranchParams parse_branch(const json& b, const std::string& ctx) {
    levels::BranchParams out;
    out.spin_orbit = require_number(b, "spin_orbit_hz", ctx);
    out.strain_alpha = optional_number(b, "strain_alpha_hz", 0.0);
    out.strain_beta = optional_number(b, "strain_beta_hz", 0.0);
    out.orbital_g_quench = optional_number(b, "orbital_quench", 0.1);
    return out;
}

void run_zeeman(const json& cfg, const Sink& sink, report::Document& doc) {
    const json& z = require_block(cfg, "zeeman", "");
    const levels::BranchParams ground = parse_branch(require_block(z, "ground", "zeeman."),
                                                     "zeeman.ground.");
    levels::BranchParams excited = parse_branch(require_block(z, "excited", "zeeman."),
                                                "zeeman.excited.");
    levels::FieldConfig field;
    if (z.contains("field")) {
        const json& f = require_block(z, "field", "zeeman.");
        field.polar_angle = optional_number(f, "polar_angle_rad", 0.0);
        field.spin_g = optional_number(f, "spin_g", 2.0);
        field.orbital_g = optional_number(f, "orbital_g", 1.0);
    }
    const std::vector<double> fields = require_number_array(z, "fields_t", "zeeman.");

    if (z.contains("solve_c3_offset_hz")) {
        const double target = require_number(z, "solve_c3_offset_hz", "zeeman.");
        levels::FieldConfig at = field;
        at.magnitude = require_number(z, "solve_at_field_t", "zeeman.");
        const double quench = levels::solve_excited_quench_for_c3(ground, excited, at, target);
        excited.orbital_g_quench = quench;
        auto& sec = doc.section("solved");
        sec.set("excited_orbital_quench", quench);
        sec.set("c3_target_hz", target);
        sec.set("at_field_t", at.magnitude);
    }

    io::Table t;
    t.column_names = {"field_t", "line", "offset_hz", "dipole", "spin_conserving"};
    t.columns.assign(5, {});
    for (double b : fields) {
        levels::FieldConfig f = field;
        f.magnitude = b;
        const levels::TransitionSet set = levels::transition_spectrum(ground, excited, f);
        for (std::size_t k = 0; k < set.transitions.size(); ++k) {
            t.columns[0].push_back(b);
            t.columns[1].push_back(static_cast<double>(k + 1));
            t.columns[2].push_back(set.transitions[k].offset);
            t.columns[3].push_back(set.transitions[k].dipole_strength);
            t.columns[4].push_back(set.transitions[k].spin_conserving ? 1.0 : 0.0);
        }
    }
    t.metadata["kind"] = "zeeman-transitions";
    sink.table("zeeman_transitions.dat", t);

    const levels::SplittingSeries series =
        levels::splitting_vs_field(ground, excited, field, fields);
    io::Table s;
    s.column_names = {"field_t", "splitting_hz"};
    s.columns.assign(2, {});
    for (const auto& pt : series.points) {
        s.columns[0].push_back(pt.field);
        s.columns[1].push_back(pt.splitting);
    }
    s.metadata["kind"] = "zeeman-splitting";
    sink.table("zeeman_splitting.dat", s);

    doc.set("slope_hz_per_t", series.slope);
    doc.set("slope_sigma_hz_per_t", series.slope_sigma);
}

void run_spin(const json& cfg, std::uint64_t seed, const Sink& sink, report::Document& doc) {
    const json& s = require_block(cfg, "spin", "");
    spin::PumpModel model;
    model.pump_rate = require_number(s, "pump_rate_hz", "spin.");
    model.t1_spin = require_number(s, "t1_spin_s", "spin.");
    model.initial_p_down = optional_number(s, "initial_p_down", 0.5);
    model.counts_per_population = require_number(s, "counts_per_population", "spin.");
    model.background = optional_number(s, "background", 0.0);

    spin::PulseSequence seq;
    seq.pulse_length = require_number(s, "pulse_length_s", "spin.");
    seq.n_pulses = static_cast<int>(require_integer(s, "n_pulses", "spin."));
    seq.wait_initial = require_number(s, "wait_initial_s", "spin.");
    seq.wait_increment = optional_number(s, "wait_increment_s", 0.0);
    seq.bin_width = require_number(s, "bin_width_s", "spin.");

    const spin::FluorescenceTrace trace = spin::simulate_pulse_train(model, seq, seed);

    io::Table t;
    t.column_names = {"time_s", "counts"};
    t.columns = {trace.time, trace.counts};
    t.metadata["kind"] = "spin-pulse-train";
    t.metadata["seed"] = format_seed(seed);
    t.metadata["bin_width_s"] = std::to_string(seq.bin_width);
    for (std::size_t k = 0; k < trace.pulses.size(); ++k) {
        char key[32], val[96];
        std::snprintf(key, sizeof key, "pulse_%02zu", k);
        std::snprintf(val, sizeof val, "start_s=%.9g first_bin=%zu bins=%zu",
                      trace.pulses[k].start_time, trace.pulses[k].first_bin,
                      trace.pulses[k].bin_count);
        t.metadata[key] = val;
    }
    sink.table("spin_trace.dat", t);

    const spin::DecayEstimate init = spin::extract_init_time(trace, 0);
    if (!init.reliable) throw FitFailure("initialization-time fit unreliable");
    doc.set("tau_init_s", init.value);
    doc.set("tau_init_sigma_s", init.sigma);

    const spin::FidelityEstimate fid = spin::init_fidelity(trace, 0);
    doc.set("fidelity_count_ratio", fid.count_ratio);
    doc.set("fidelity_model", spin::model_fidelity(model, seq.pulse_length));

    if (seq.n_pulses >= 5) {
        const spin::DecayEstimate t1 = spin::extract_t1(trace);
        if (!t1.reliable) throw FitFailure("T1 recovery fit unreliable");
        doc.set("t1_spin_s", t1.value);
        doc.set("t1_spin_sigma_s", t1.sigma);
    }
}

void run_purcell_fit(const json& cfg, const Sink& sink, report::Document& doc) {
    const json& p = require_block(cfg, "purcell", "");
    const json& g = require_block(p, "geometry", "purcell.");
    pipelines::PurcellSeriesGeometry geometry;
    geometry.roc = require_number(g, "roc_m", "purcell.geometry.");
    geometry.wavelength = require_number(g, "wavelength_m", "purcell.geometry.");
    geometry.finesse = require_number(g, "finesse", "purcell.geometry.");
    geometry.refractive_index = optional_number(g, "refractive_index", 1.0);

    if (!p.contains("points") || !p.at("points").is_array() || p.at("points").empty())
        missing("purcell.points");
    std::vector<pipelines::LinewidthPoint> series;
    for (const auto& pt : p.at("points")) {
        pipelines::LinewidthPoint lp;
        lp.mode_order = static_cast<int>(require_integer(pt, "order", "purcell.points[]."));
        lp.fwhm = require_number(pt, "fwhm_hz", "purcell.points[].");
        lp.sigma = require_number(pt, "sigma_hz", "purcell.points[].");
        series.push_back(lp);
    }

    const std::string mode_name = require_string(p, "mode", "purcell.");
    pipelines::PurcellFitMode mode;
    if (mode_name == "fixed")
        mode = pipelines::PurcellFitMode::fixed_free_space;
    else if (mode_name == "free")
        mode = pipelines::PurcellFitMode::free_free_space;
    else
        missing("purcell.mode");
    const double gamma_free = optional_number(p, "gamma_free_hz", 0.0);

    const pipelines::PurcellExtraction ex =
        pipelines::purcell_from_linewidths(series, geometry, mode, gamma_free);
    if (!ex.result.converged) throw FitFailure("linewidth-vs-length fit did not converge");

    doc.set("mode", mode_name);
    doc.set("purcell_shortest", ex.purcell_shortest);
    doc.set("purcell_sigma", ex.purcell_sigma);
    doc.set("gamma_free_hz", ex.gamma_free);
    doc.set("gamma_free_sigma_hz", ex.gamma_free_sigma);
    doc.set("coupling_scale", ex.coupling_scale);
    doc.set("reduced_chi2", ex.result.reduced_chi2);

    io::Table t;
    t.column_names = {"order", "fwhm_hz", "sigma_hz", "model_hz"};
    t.columns.assign(4, {});
    for (const auto& pt : series) {
        const double length =
            cavity::effective_length_from_order(pt.mode_order, geometry.wavelength);
        cavity::CavityGeometry cg;
        cg.roc = geometry.roc;
        cg.eff_length = length;
        cg.wavelength = geometry.wavelength;
        cg.transmission_a_ppm = 1.0;
        const cavity::GaussianMode gm = cavity::mode_geometry(cg, pt.mode_order);
        const cavity::CavityQuality q =
            cavity::quality_factor(geometry.finesse, length, geometry.wavelength);
        const double figure = cavity::purcell_ideal(q.q_factor, gm.mode_volume_lambda3,
                                                    geometry.refractive_index) /
                              gm.position_penalty;
        t.columns[0].push_back(pt.mode_order);
        t.columns[1].push_back(pt.fwhm);
        t.columns[2].push_back(pt.sigma);
        t.columns[3].push_back(ex.gamma_free * (1.0 + ex.coupling_scale * figure));
    }
    t.metadata["kind"] = "purcell-linewidths";
    sink.table("purcell_linewidths.dat", t);
}

void run_sensitivity(const json& cfg, std::uint64_t seed, const Sink& sink,
                     report::Document& doc) {
    const json& s = require_block(cfg, "sensitivity", "");
    const double slope_true = require_number(s, "slope_hz_per_t", "sensitivity.");
    const std::vector<double> fields = require_number_array(s, "fields_t", "sensitivity.");
    const double fwhm = require_number(s, "line_fwhm_hz", "sensitivity.");
    const double peak_rate = require_number(s, "peak_rate_cps", "sensitivity.");
    const double background = optional_number(s, "background_cps", 0.0);
    const double span = require_number(s, "scan_span_hz", "sensitivity.");
    const auto points = static_cast<std::size_t>(require_integer(s, "scan_points", "sensitivity."));
    const double dwell = require_number(s, "dwell_s", "sensitivity.");
    if (points < 5) missing("sensitivity.scan_points");
    if (fields.size() < 2) missing("sensitivity.fields_t");

    // One scan per line, two lines per field, Poisson counts; the splitting
    // and its uncertainty come from the two Lorentzian centers.
    std::vector<double> split(fields.size()), split_sigma(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        double centers[2], sigmas[2];
        for (int line = 0; line < 2; ++line) {
            const double c0 = (line == 0 ? -0.5 : 0.5) * slope_true * fields[i];
            const std::vector<double> grid = linspace(c0 - 0.5 * span, c0 + 0.5 * span, points);
            rng::Engine engine = rng::Engine::substream(seed, i * 2 + static_cast<std::size_t>(line));

            std::vector<double> rate(points), sigma(points);
            for (std::size_t k = 0; k < points; ++k) {
                const double mean =
                    (peak_rate * ple::lorentzian(grid[k], c0, fwhm) + background) * dwell;
                const double counts = static_cast<double>(engine.poisson(mean));
                rate[k] = counts / dwell;
                sigma[k] = std::sqrt(std::max(counts, 1.0)) / dwell;
            }

            io::Table t;
            t.column_names = {"frequency_hz", "rate_cps", "sigma_cps"};
            t.columns = {grid, rate, sigma};
            t.metadata["kind"] = "sensitivity-scan";
            t.metadata["field_t"] = std::to_string(fields[i]);
            t.metadata["line"] = line == 0 ? "low" : "high";
            t.metadata["dwell_s"] = std::to_string(dwell);
            char name[64];
            std::snprintf(name, sizeof name, "sensitivity_scan_%02zu_%s.dat", i,
                          line == 0 ? "low" : "high");
            sink.table(name, t);

            const pipelines::LorentzianFit lf = pipelines::fit_lorentzian(grid, rate, sigma);
            if (!lf.result.converged || !lf.peak_found)
                throw FitFailure("line fit failed at field index " + std::to_string(i));
            centers[line] = lf.center;
            sigmas[line] = lf.result.sigma(0);
        }
        split[i] = centers[1] - centers[0];
        split_sigma[i] = std::hypot(sigmas[0], sigmas[1]);
    }

    io::Table st;
    st.column_names = {"field_t", "splitting_hz", "sigma_hz"};
    st.columns = {fields, split, split_sigma};
    st.metadata["kind"] = "sensitivity-splittings";
    st.metadata["seed"] = format_seed(seed);
    sink.table("sensitivity_splittings.dat", st);

    // Weighted through-origin slope; the splitting vanishes at zero field.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double w = 1.0 / (split_sigma[i] * split_sigma[i]);
        num += w * fields[i] * split[i];
        den += w * fields[i] * fields[i];
    }
    const double slope = num / den;
    const double slope_sigma = 1.0 / std::sqrt(den);

    // Field-equivalent noise of one splitting determination, taken at the
    // median-uncertainty field; acquisition time covers that field's pair of
    // scans.
    std::vector<double> sorted = split_sigma;
    std::sort(sorted.begin(), sorted.end());
    const double sigma_split = sorted[sorted.size() / 2];
    const double t_meas = 2.0 * static_cast<double>(points) * dwell;
    const double eta = pipelines::dc_sensitivity(sigma_split, slope, t_meas);

    doc.set("slope_hz_per_t", slope);
    doc.set("slope_sigma_hz_per_t", slope_sigma);
    doc.set("slope_true_hz_per_t", slope_true);
    doc.set("sigma_splitting_hz", sigma_split);
    doc.set("acquisition_time_s", t_meas);
    doc.set("sensitivity_t_per_sqrt_hz", eta);
}

RunOutcome run_parsed(const json& cfg, const RunOptions& options);

void run_sweep(const json& cfg, std::uint64_t seed, const RunOptions& options, const Sink& sink,
               report::Document& doc, int& worst_exit) {
    const json& sw = require_block(cfg, "sweep", "");
    const std::string parameter = require_string(sw, "parameter", "sweep.");
    const std::vector<double> values = require_number_array(sw, "values", "sweep.");
    const json& base = require_block(cfg, "base", "");

    io::Table index;
    index.column_names = {"index", "value", "exit_code"};
    index.columns.assign(3, {});

    for (std::size_t i = 0; i < values.size(); ++i) {
        json instance = base;
        // Descend the dotted path; every intermediate must already exist.
        json* node = &instance;
        std::string rest = parameter;
        while (true) {
            const auto dot = rest.find('.');
            const std::string head = rest.substr(0, dot);
            if (dot == std::string::npos) {
                if (!node->is_object() || !node->contains(head))
                    missing("sweep.parameter (" + parameter + ")");
                (*node)[head] = values[i];
                break;
            }
            if (!node->is_object() || !node->contains(head))
                missing("sweep.parameter (" + parameter + ")");
            node = &(*node)[head];
            rest = rest.substr(dot + 1);
        }
        if (!instance.contains("seed")) instance["seed"] = rng::mix64(seed ^ rng::mix64(i));

        char sub[32];
        std::snprintf(sub, sizeof sub, "sweep_%03zu", i);
        RunOptions inner = options;
        inner.out_dir = options.out_dir / sub;
        const RunOutcome res = run_parsed(instance, inner);
        worst_exit = std::max(worst_exit, res.exit_code);
        for (const auto& f : res.files) sink.files->push_back(f);

        index.columns[0].push_back(static_cast<double>(i));
        index.columns[1].push_back(values[i]);
        index.columns[2].push_back(res.exit_code);
    }

    index.metadata["kind"] = "sweep-index";
    index.metadata["parameter"] = parameter;
    sink.table("sweep_index.dat", index);  // merged index written last
    doc.set("instances", static_cast<std::int64_t>(values.size()));
    doc.set("parameter", parameter);
    doc.set("worst_exit_code", static_cast<std::int64_t>(worst_exit));
}

const std::set<std::string>& known_ids() {
    static const std::set<std::string> ids = {"cavity-report", "modes-infer", "ple",
                                              "g2",            "zeeman",      "spin",
                                              "purcell-fit",   "sensitivity", "sweep"};
    return ids;
}

bool scenario_needs_seed(const std::string& id) {
    return id == "ple" || id == "g2" || id == "spin" || id == "sensitivity" || id == "sweep";
}

RunOutcome run_parsed(const json& cfg, const RunOptions& options) {
    RunOutcome outcome;
    try {
        const std::string id = require_string(cfg, "scenario", "");
        if (!scenario_known(id))
            throw std::invalid_argument("scenario: unknown id '" + id + "'");

        std::uint64_t seed = 0;
        if (options.seed_override) {
            seed = *options.seed_override;
        } else if (cfg.contains("seed")) {
            if (!cfg.at("seed").is_number_unsigned() && !cfg.at("seed").is_number_integer())
                missing("seed");
            seed = cfg.at("seed").get<std::uint64_t>();
        } else if (scenario_needs_seed(id)) {
            throw std::invalid_argument("seed: required for scenario '" + id + "'");
        }

        std::filesystem::create_directories(options.out_dir);
        Sink sink{options.out_dir, options.format, &outcome.files};

        report::Document doc;
        doc.set("scenario", id);
        if (scenario_needs_seed(id)) doc.set("seed", static_cast<std::int64_t>(seed));

        int worst_exit = 0;
        if (id == "cavity-report")
            run_cavity_report(cfg, sink, doc);
        else if (id == "modes-infer")
            run_modes_infer(cfg, sink, doc);
        else if (id == "ple")
            run_ple(cfg, seed, sink, doc);
        else if (id == "g2")
            run_g2(cfg, seed, sink, doc);
        else if (id == "zeeman")
            run_zeeman(cfg, sink, doc);
        else if (id == "spin")
            run_spin(cfg, seed, sink, doc);
        else if (id == "purcell-fit")
            run_purcell_fit(cfg, sink, doc);
        else if (id == "sensitivity")
            run_sensitivity(cfg, seed, sink, doc);
        else
            run_sweep(cfg, seed, options, sink, doc, worst_exit);

        const std::string base = id == "sweep" ? "sweep_result" : id;
        std::string name = base;
        std::replace(name.begin(), name.end(), '-', '_');
        sink.document(name, doc);

        outcome.exit_code = worst_exit;
        outcome.message = "scenario '" + id + "' completed";
        if (worst_exit != 0) outcome.message += " with failing sweep instances";
    } catch (const FitFailure& e) {
        outcome.exit_code = 3;
        outcome.message = e.what();
    } catch (const std::exception& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
    }
    return outcome;
}

}  // namespace

bool scenario_known(const std::string& id) { return known_ids().count(id) > 0; }

RunOutcome run_config_text(const std::string& config_json, const RunOptions& options) {
    json cfg = json::parse(config_json, nullptr, false);
    if (cfg.is_discarded()) {
        RunOutcome outcome;
        outcome.exit_code = 2;
        outcome.message = "config is not valid JSON";
        return outcome;
    }
    return run_parsed(cfg, options);
}

RunOutcome run_config_file(const std::filesystem::path& config_path, const RunOptions& options) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        RunOutcome outcome;
        outcome.exit_code = 2;
        outcome.message = "cannot open config: " + config_path.string();
        return outcome;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_config_text(buf.str(), options);
}

}  // namespace sivcav::scenarios
