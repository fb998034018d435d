#pragma once

#include <cstdint>
#include <vector>

#include "sivcav/fit.hpp"

namespace sivcav::spin {

// Two-state rate model of optical spin initialization: the laser pumps
// population out of the fluorescing (addressed) spin state at Gamma_p while
// spin relaxation drags both populations back toward the equal mixture with
// time constant T1.
struct PumpModel {
    double pump_rate = 0.0;              // Gamma_p [Hz] while the laser is on
    double t1_spin = 0.0;                // [s]
    double initial_p_down = 0.5;         // fluorescing-state population at t = 0
    double counts_per_population = 0.0;  // detector rate [counts/s] per unit p_down
    double background = 0.0;             // detector rate [counts/s], laser on or off
};

struct PulseSequence {
    double pulse_length = 0.0;    // [s]
    int n_pulses = 1;
    double wait_initial = 0.0;    // gap before the second pulse [s]
    double wait_increment = 0.0;  // added to each successive gap [s]
    double bin_width = 0.0;       // [s]
};

struct PulseWindow {
    std::size_t first_bin = 0;
    std::size_t bin_count = 0;
    double start_time = 0.0;  // [s]
};

struct FluorescenceTrace {
    double bin_width = 0.0;           // [s]
    std::vector<double> time;         // bin centers [s]
    std::vector<double> counts;       // per bin
    std::vector<PulseWindow> pulses;  // boundary markers
    std::uint64_t seed = 0;
};

void validate(const PumpModel& model);
void validate(const PulseSequence& seq);

// 1 / (Gamma_p + 1/T1): the exponential time constant during illumination.
double init_time_constant(const PumpModel& model);

// Illuminated fixed point p_inf = (1/2T1) * tau_init.
double pumped_steady_population(const PumpModel& model);

// p_down(t) during illumination, starting from model.initial_p_down.
double pump_dynamics(const PumpModel& model, double t);

// Dark-interval relaxation toward the equal mixture.
double relax_between_pulses(const PumpModel& model, double p_down_end, double wait);

// Noise-free piecewise rate [counts/s] at absolute time t of the pulse train.
double expected_rate(const PumpModel& model, const PulseSequence& seq, double t);

FluorescenceTrace simulate_pulse_train(const PumpModel& model, const PulseSequence& seq,
                                       std::uint64_t seed);

struct DecayEstimate {
    double value = 0.0;  // [s]
    double sigma = 0.0;  // [s]
    bool reliable = false;
    fit::FitResult fit;
};

// Single-exponential-plus-offset fit of the in-pulse decay. reliable is
// cleared when the signal does not decay or the fit fails to converge.
DecayEstimate extract_init_time(const FluorescenceTrace& trace, std::size_t pulse_index);

struct FidelityEstimate {
    double count_ratio = 0.0;  // 1 - S_end/S_start from the fitted in-pulse decay
    double s_start = 0.0;      // background-corrected rate at pulse start
    double s_end = 0.0;        // background-corrected rate at pulse end
};

// Count-ratio initialization fidelity, background subtracted from
// inter-pulse bins (first pulse of a single-pulse trace uses trailing bins).
FidelityEstimate init_fidelity(const FluorescenceTrace& trace, std::size_t pulse_index);

// Model (state) fidelity p_up at the end of a pulse, for comparison with the
// count-ratio estimator, which is systematically lower.
double model_fidelity(const PumpModel& model, double pulse_length);

// Per-pulse decaying amplitude vs preceding wait, A(w) = A_inf (1 - e^{-w/T1}).
DecayEstimate extract_t1(const FluorescenceTrace& trace);

}  // namespace sivcav::spin
