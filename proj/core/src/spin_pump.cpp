#include "sivcav/spin_pump.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sivcav/rng.hpp"

namespace sivcav::spin {

namespace {

struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    bool lit = false;
    double p_start = 0.5;
};

// Piecewise timeline: pulse k, then a dark gap of wait_initial + k*increment.
// The trailing gap after the last pulse provides background bins.
std::vector<Segment> build_segments(const PumpModel& model, const PulseSequence& seq) {
    std::vector<Segment> segs;
    double t = 0.0;
    double p = model.initial_p_down;
    PumpModel lit = model;
    for (int k = 0; k < seq.n_pulses; ++k) {
        lit.initial_p_down = p;
        segs.push_back({t, t + seq.pulse_length, true, p});
        p = pump_dynamics(lit, seq.pulse_length);
        t += seq.pulse_length;

        const double wait = seq.wait_initial + static_cast<double>(k) * seq.wait_increment;
        segs.push_back({t, t + wait, false, p});
        p = relax_between_pulses(model, p, wait);
        t += wait;
    }
    return segs;
}

double segment_rate(const PumpModel& model, const std::vector<Segment>& segs, double t) {
    for (const auto& s : segs) {
        if (t < s.t0 || t >= s.t1) continue;
        if (!s.lit) return model.background;
        PumpModel m = model;
        m.initial_p_down = s.p_start;
        return model.counts_per_population * pump_dynamics(m, t - s.t0) + model.background;
    }
    return model.background;
}

struct PulseData {
    std::vector<double> t;  // relative to pulse start [s]
    std::vector<double> rate;
    std::vector<double> sigma;
};

PulseData pulse_bins(const FluorescenceTrace& trace, std::size_t pulse_index) {
    if (pulse_index >= trace.pulses.size()) throw std::out_of_range("pulse index out of range");
    const PulseWindow& w = trace.pulses[pulse_index];
    if (w.bin_count < 10) throw std::invalid_argument("pulse needs at least 10 bins to fit");
    PulseData d;
    for (std::size_t i = w.first_bin; i < w.first_bin + w.bin_count; ++i) {
        d.t.push_back(trace.time[i] - w.start_time);
        d.rate.push_back(trace.counts[i] / trace.bin_width);
        d.sigma.push_back(std::sqrt(std::max(trace.counts[i], 1.0)) / trace.bin_width);
    }
    return d;
}

double interpulse_background(const FluorescenceTrace& trace) {
    std::vector<bool> in_pulse(trace.time.size(), false);
    for (const auto& w : trace.pulses)
        for (std::size_t i = w.first_bin; i < w.first_bin + w.bin_count; ++i) in_pulse[i] = true;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < trace.time.size(); ++i) {
        if (in_pulse[i]) continue;
        sum += trace.counts[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("no inter-pulse bins for background estimation");
    return sum / (static_cast<double>(n) * trace.bin_width);
}

// A e^{-t/tau} + C fit of one pulse. Shared by the init-time, fidelity and
// T1 extractions; fix_tau > 0 freezes the decay constant (amplitude-only
// refit once tau is known from the cleanest pulse).
fit::FitResult fit_pulse_decay(const PulseData& d, double pulse_length, double fix_tau = 0.0) {
    const std::size_t quarter = std::max<std::size_t>(1, d.t.size() / 4);
    double tail = 0.0;
    for (std::size_t i = d.t.size() - quarter; i < d.t.size(); ++i) tail += d.rate[i];
    tail /= static_cast<double>(quarter);
    const double a0 = std::max(d.rate.front() - tail, 1e-6 * std::max(std::abs(tail), 1.0));

    double tau0 = fix_tau > 0.0 ? fix_tau : pulse_length / 5.0;
    if (fix_tau <= 0.0) {
        const double knee = tail + a0 / std::numbers::e;
        for (std::size_t i = 0; i < d.t.size(); ++i) {
            if (d.rate[i] < knee) {
                if (d.t[i] > 0.0) tau0 = d.t[i];
                break;
            }
        }
    }

    fit::FitProblem prob;
    prob.x = d.t;
    prob.y = d.rate;
    prob.sigma = d.sigma;
    if (fix_tau > 0.0) {
        prob.model_id = "exp-decay-fixed-tau";
        prob.parameter_names = {"amplitude [counts/s]", "offset [counts/s]"};
        prob.initial = Eigen::Vector2d(a0, tail);
        const double tau = fix_tau;
        prob.model = [tau](double t, const Eigen::VectorXd& p) {
            return p(0) * std::exp(-t / tau) + p(1);
        };
    } else {
        prob.model_id = "exp-decay";
        prob.parameter_names = {"amplitude [counts/s]", "tau [s]", "offset [counts/s]"};
        prob.initial = Eigen::Vector3d(a0, tau0, tail);
        prob.lower = Eigen::Vector3d(-1e300, pulse_length * 1e-4, -1e300);
        prob.upper = Eigen::Vector3d(1e300, pulse_length * 1e4, 1e300);
        prob.model = [](double t, const Eigen::VectorXd& p) {
            return p(0) * std::exp(-t / p(1)) + p(2);
        };
    }
    return fit::least_squares(prob);
}

}  // namespace

void validate(const PumpModel& model) {
    if (model.pump_rate < 0.0) throw std::invalid_argument("pump rate must be non-negative");
    if (!(model.t1_spin > 0.0)) throw std::invalid_argument("T1 must be positive");
    if (!(model.initial_p_down >= 0.0 && model.initial_p_down <= 1.0))
        throw std::invalid_argument("populations lie in [0, 1]");
    if (model.counts_per_population < 0.0 || model.background < 0.0)
        throw std::invalid_argument("count rates must be non-negative");
}

void validate(const PulseSequence& seq) {
    if (!(seq.pulse_length > 0.0)) throw std::invalid_argument("pulse length must be positive");
    if (seq.n_pulses < 1) throw std::invalid_argument("need at least one pulse");
    if (!(seq.wait_initial > 0.0)) throw std::invalid_argument("wait must be positive");
    if (seq.wait_increment < 0.0) throw std::invalid_argument("wait increment must be non-negative");
    if (!(seq.bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
}

double init_time_constant(const PumpModel& model) {
    validate(model);
    return 1.0 / (model.pump_rate + 1.0 / model.t1_spin);
}

double pumped_steady_population(const PumpModel& model) {
    return 0.5 / model.t1_spin * init_time_constant(model);
}

double pump_dynamics(const PumpModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    const double tau = init_time_constant(model);
    const double p_inf = pumped_steady_population(model);
    return p_inf + (model.initial_p_down - p_inf) * std::exp(-t / tau);
}

double relax_between_pulses(const PumpModel& model, double p_down_end, double wait) {
    validate(model);
    if (wait < 0.0) throw std::invalid_argument("wait must be non-negative");
    if (!(p_down_end >= 0.0 && p_down_end <= 1.0))
        throw std::invalid_argument("populations lie in [0, 1]");
    return 0.5 + (p_down_end - 0.5) * std::exp(-wait / model.t1_spin);
}

double expected_rate(const PumpModel& model, const PulseSequence& seq, double t) {
    validate(model);
    validate(seq);
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    return segment_rate(model, build_segments(model, seq), t);
}

FluorescenceTrace simulate_pulse_train(const PumpModel& model, const PulseSequence& seq,
                                       std::uint64_t seed) {
    validate(model);
    validate(seq);
    const auto segs = build_segments(model, seq);
    const double total = segs.back().t1;
    const auto n_bins = static_cast<std::size_t>(std::llround(std::floor(total / seq.bin_width + 1e-9)));

    FluorescenceTrace trace;
    trace.bin_width = seq.bin_width;
    trace.seed = seed;
    trace.time.resize(n_bins);
    trace.counts.resize(n_bins);
    rng::Engine engine(seed);
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double center = (static_cast<double>(i) + 0.5) * seq.bin_width;
        trace.time[i] = center;
        const double mean = segment_rate(model, segs, center) * seq.bin_width;
        trace.counts[i] = static_cast<double>(engine.poisson(mean));
    }

    for (const auto& s : segs) {
        if (!s.lit) continue;
        PulseWindow w;
        w.start_time = s.t0;
        w.first_bin = n_bins;
        for (std::size_t i = 0; i < n_bins; ++i) {
            if (trace.time[i] < s.t0 || trace.time[i] >= s.t1) continue;
            w.first_bin = std::min(w.first_bin, i);
            ++w.bin_count;
        }
        trace.pulses.push_back(w);
    }
    return trace;
}

DecayEstimate extract_init_time(const FluorescenceTrace& trace, std::size_t pulse_index) {
    const PulseData d = pulse_bins(trace, pulse_index);
    const double pulse_length = d.t.back() - d.t.front() + trace.bin_width;

    DecayEstimate est;
    est.fit = fit_pulse_decay(d, pulse_length);
    est.value = est.fit.parameters(1);
    est.sigma = est.fit.sigma(1);
    est.reliable = est.fit.converged && !est.fit.singular && est.fit.parameters(0) > 0.0 &&
                   std::isfinite(est.sigma) && est.sigma < est.value;
    return est;
}

FidelityEstimate init_fidelity(const FluorescenceTrace& trace, std::size_t pulse_index) {
    const PulseData d = pulse_bins(trace, pulse_index);
    const double pulse_length = d.t.back() - d.t.front() + trace.bin_width;
    const double bg = interpulse_background(trace);

    const fit::FitResult f = fit_pulse_decay(d, pulse_length);
    const double a = f.parameters(0);
    const double tau = f.parameters(1);
    const double c = f.parameters(2);

    FidelityEstimate est;
    est.s_start = a + c - bg;
    est.s_end = a * std::exp(-pulse_length / tau) + c - bg;
    if (!(est.s_start > 0.0)) throw std::runtime_error("no signal above background at pulse start");
    est.count_ratio = 1.0 - est.s_end / est.s_start;
    return est;
}

double model_fidelity(const PumpModel& model, double pulse_length) {
    validate(model);
    return 1.0 - pump_dynamics(model, pulse_length);
}

DecayEstimate extract_t1(const FluorescenceTrace& trace) {
    // Pulses preceded by a dark interval carry the recovery information.
    std::vector<double> waits;
    std::vector<std::size_t> indices;
    for (std::size_t k = 1; k < trace.pulses.size(); ++k) {
        const PulseWindow& prev = trace.pulses[k - 1];
        const double prev_end = prev.start_time +
                                static_cast<double>(prev.bin_count) * trace.bin_width;
        waits.push_back(trace.pulses[k].start_time - prev_end);
        indices.push_back(k);
    }
    if (indices.size() < 4)
        throw std::invalid_argument("T1 extraction needs at least 4 wait-preceded pulses");

    // The longest wait gives the largest amplitude: calibrate tau there, then
    // refit every pulse with tau frozen so amplitudes are comparable.
    const std::size_t ref = indices.back();
    const PulseData ref_data = pulse_bins(trace, ref);
    const double pulse_length = ref_data.t.back() - ref_data.t.front() + trace.bin_width;
    const fit::FitResult ref_fit = fit_pulse_decay(ref_data, pulse_length);
    const double tau = ref_fit.parameters(1);
    if (!ref_fit.converged || !std::isfinite(tau) || tau <= 0.0) return {};

    // Starved or degenerate pulses come back with unusable uncertainties;
    // drop them instead of poisoning the recovery fit (an unreliable result,
    // never a validation error).
    std::vector<double> used_waits, amp, amp_sigma;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const fit::FitResult f = fit_pulse_decay(pulse_bins(trace, indices[i]), pulse_length, tau);
        const double a = f.parameters(0);
        const double s = f.sigma(0);
        if (!f.converged || f.singular || !std::isfinite(a) || !std::isfinite(s)) continue;
        used_waits.push_back(waits[i]);
        amp.push_back(a);
        amp_sigma.push_back(std::max(s, 1e-12 * std::abs(a) + 1e-300));
    }
    if (used_waits.size() < 4) return {};
    waits = std::move(used_waits);

    fit::FitProblem prob;
    prob.model_id = "t1-recovery";
    prob.parameter_names = {"amplitude_inf [counts/s]", "t1 [s]"};
    prob.x = waits;
    prob.y = amp;
    prob.sigma = amp_sigma;
    const double w_max = *std::max_element(waits.begin(), waits.end());
    const double a_max = *std::max_element(amp.begin(), amp.end());
    prob.initial = Eigen::Vector2d(std::max(a_max, 1e-300), 0.5 * w_max);
    prob.lower = Eigen::Vector2d(0.0, w_max * 1e-4);
    prob.upper = Eigen::Vector2d(1e300, w_max * 1e4);
    prob.model = [](double w, const Eigen::VectorXd& p) {
        return p(0) * (1.0 - std::exp(-w / p(1)));
    };

    DecayEstimate est;
    est.fit = fit::least_squares(prob);
    est.value = est.fit.parameters(1);
    est.sigma = est.fit.sigma(1);
    est.reliable = est.fit.converged && !est.fit.singular && std::isfinite(est.sigma) &&
                   est.sigma < est.value;
    return est;
}

}  // namespace sivcav::spin
