#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sivcav/spin_pump.hpp"

using namespace sivcav;

namespace {

// Pump rate tuned so the illuminated time constant is exactly 67 ns at
// T1 = 350 ns: Gamma_p = 1/67ns - 1/350ns.
spin::PumpModel reference_model() {
    spin::PumpModel m;
    m.pump_rate = 1.0 / 67e-9 - 1.0 / 350e-9;
    m.t1_spin = 350e-9;
    m.initial_p_down = 0.5;
    m.counts_per_population = 5.12e11;
    m.background = 2.56e10;
    return m;
}

spin::PulseSequence reference_sequence() {
    spin::PulseSequence s;
    s.pulse_length = 750e-9;
    s.n_pulses = 10;
    s.wait_initial = 75e-9;
    s.wait_increment = 75e-9;
    s.bin_width = 5e-9;
    return s;
}

}  // namespace

TEST_CASE("illuminated time constant is the inverse summed rate") {
    const auto m = reference_model();
    CHECK(spin::init_time_constant(m) == doctest::Approx(67e-9).epsilon(1e-12));
    // p_inf = tau / (2 T1) = 67/700.
    CHECK(spin::pumped_steady_population(m) ==
          doctest::Approx(67.0 / 700.0).epsilon(1e-12));
}

TEST_CASE("pump dynamics interpolates between start and fixed point") {
    const auto m = reference_model();
    const double p_inf = spin::pumped_steady_population(m);
    CHECK(spin::pump_dynamics(m, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(spin::pump_dynamics(m, 1e-5) == doctest::Approx(p_inf).epsilon(1e-12));
    // One time constant covers 1 - 1/e of the gap.
    const double p_tau = spin::pump_dynamics(m, 67e-9);
    CHECK(p_tau == doctest::Approx(p_inf + (0.5 - p_inf) * std::exp(-1.0)).epsilon(1e-9));
    CHECK_THROWS_AS(spin::pump_dynamics(m, -1e-9), std::invalid_argument);
}

TEST_CASE("with the laser off the pump reduces to spin relaxation") {
    spin::PumpModel dark = reference_model();
    dark.pump_rate = 0.0;
    dark.initial_p_down = 0.1;
    for (double t : {0.0, 50e-9, 350e-9, 2e-6}) {
        CHECK(spin::pump_dynamics(dark, t) ==
              doctest::Approx(spin::relax_between_pulses(dark, 0.1, t)).epsilon(1e-12));
    }
}

TEST_CASE("dark relaxation drifts toward the equal mixture") {
    const auto m = reference_model();
    CHECK(spin::relax_between_pulses(m, 0.1, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(spin::relax_between_pulses(m, 0.1, 1e-4) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spin::relax_between_pulses(m, 0.1, 350e-9) ==
          doctest::Approx(0.5 - 0.4 * std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(spin::relax_between_pulses(m, 1.4, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(spin::relax_between_pulses(m, 0.1, -1e-9), std::invalid_argument);
}

TEST_CASE("expected rate is piecewise: lit decay, dark background") {
    const auto m = reference_model();
    const auto seq = reference_sequence();

    // Inside the first pulse the rate tracks the pump curve.
    spin::PumpModel probe = m;
    const double r_start = spin::expected_rate(m, seq, 0.0);
    CHECK(r_start ==
          doctest::Approx(m.counts_per_population * 0.5 + m.background).epsilon(1e-12));
    const double r_mid = spin::expected_rate(m, seq, 100e-9);
    CHECK(r_mid == doctest::Approx(m.counts_per_population * spin::pump_dynamics(probe, 100e-9) +
                                   m.background)
                       .epsilon(1e-12));

    // First gap spans [750, 825) ns: background only.
    CHECK(spin::expected_rate(m, seq, 780e-9) == m.background);

    // Second pulse starts at 825 ns from the relaxed population; probe half a
    // bin inside to stay clear of the boundary.
    const double p_end = spin::pump_dynamics(probe, seq.pulse_length);
    const double p_recovered = spin::relax_between_pulses(m, p_end, seq.wait_initial);
    spin::PumpModel recovered = m;
    recovered.initial_p_down = p_recovered;
    CHECK(spin::expected_rate(m, seq, 827.5e-9) ==
          doctest::Approx(m.counts_per_population * spin::pump_dynamics(recovered, 2.5e-9) +
                          m.background)
              .epsilon(1e-9));

    CHECK_THROWS_AS(spin::expected_rate(m, seq, -1e-9), std::invalid_argument);
}

TEST_CASE("simulated pulse train has the declared window structure") {
    const auto m = reference_model();
    const auto seq = reference_sequence();
    const auto trace = spin::simulate_pulse_train(m, seq, 50000);

    // Total span: 10 pulses of 750 ns plus gaps 75, 150, ..., 750 ns.
    REQUIRE(trace.time.size() == 2325);
    REQUIRE(trace.pulses.size() == 10);
    CHECK(trace.bin_width == 5e-9);
    CHECK(trace.seed == 50000);

    double expected_start = 0.0;
    for (int k = 0; k < 10; ++k) {
        const auto& w = trace.pulses[static_cast<std::size_t>(k)];
        CHECK(w.start_time == doctest::Approx(expected_start).scale(1e-6).epsilon(1e-9));
        CHECK(w.bin_count == 150);
        CHECK(w.first_bin ==
              static_cast<std::size_t>(std::llround(expected_start / seq.bin_width)));
        expected_start += seq.pulse_length + seq.wait_initial +
                          static_cast<double>(k) * seq.wait_increment;
    }

    // Bin centers pace uniformly and counts are non-negative integers.
    for (std::size_t i = 0; i < trace.time.size(); ++i) {
        CHECK(trace.time[i] ==
              doctest::Approx((static_cast<double>(i) + 0.5) * 5e-9).epsilon(1e-12));
        CHECK(trace.counts[i] >= 0.0);
        CHECK(trace.counts[i] == std::floor(trace.counts[i]));
    }

    // Reproducibility in both directions.
    const auto again = spin::simulate_pulse_train(m, seq, 50000);
    bool same = true;
    for (std::size_t i = 0; i < trace.counts.size(); ++i)
        same = same && (trace.counts[i] == again.counts[i]);
    CHECK(same);
    const auto other = spin::simulate_pulse_train(m, seq, 50001);
    bool differ = false;
    for (std::size_t i = 0; i < trace.counts.size(); ++i)
        differ = differ || (trace.counts[i] != other.counts[i]);
    CHECK(differ);
}

TEST_CASE("initialization time is recovered from the first pulse") {
    const auto trace =
        spin::simulate_pulse_train(reference_model(), reference_sequence(), 50000);
    const auto est = spin::extract_init_time(trace, 0);
    CHECK(est.reliable);
    CHECK(est.sigma > 0.0);
    CHECK(est.sigma < 3e-9);
    CHECK(std::abs(est.value - 67e-9) < 2e-9);
    CHECK(est.fit.converged);
}

TEST_CASE("spin relaxation time is recovered from the recovery amplitudes") {
    const auto trace =
        spin::simulate_pulse_train(reference_model(), reference_sequence(), 50000);
    const auto est = spin::extract_t1(trace);
    CHECK(est.reliable);
    CHECK(est.sigma > 0.0);
    CHECK(est.sigma < 20e-9);
    CHECK(std::abs(est.value - 350e-9) < 3.5 * est.sigma);
}

TEST_CASE("starved traces degrade to an unreliable estimate, not a throw") {
    spin::PumpModel weak = reference_model();
    weak.counts_per_population = 2.0e9;
    weak.background = 1.0e8;
    const auto trace = spin::simulate_pulse_train(weak, reference_sequence(), 1);
    const auto est = spin::extract_t1(trace);
    CHECK_FALSE(est.reliable);
}

TEST_CASE("count-ratio fidelity sits below the model fidelity") {
    const auto m = reference_model();
    const auto trace = spin::simulate_pulse_train(m, reference_sequence(), 50000);
    const auto fid = spin::init_fidelity(trace, 0);
    CHECK(fid.s_start > 0.0);
    CHECK(fid.s_end > 0.0);
    CHECK(fid.count_ratio > 0.78);
    CHECK(fid.count_ratio < 0.84);

    // The state fidelity counts the pumped steady population as success;
    // the count ratio cannot reach it.
    // After 11 pump time constants the population has settled to p_inf up to
    // a 6e-6 residual, so the model fidelity is 1 - 67/700 to that accuracy.
    const double model_f = spin::model_fidelity(m, reference_sequence().pulse_length);
    CHECK(model_f == doctest::Approx(1.0 - 67.0 / 700.0).epsilon(1e-4));
    CHECK(fid.count_ratio < model_f);
}

TEST_CASE("extraction demands enough bins and enough pulses") {
    spin::PulseSequence tiny = reference_sequence();
    tiny.pulse_length = 40e-9;  // 8 bins, below the 10-bin fitting floor
    tiny.n_pulses = 2;
    const auto short_trace = spin::simulate_pulse_train(reference_model(), tiny, 7);
    CHECK_THROWS_AS(spin::extract_init_time(short_trace, 0), std::invalid_argument);
    CHECK_THROWS_AS(spin::extract_init_time(short_trace, 5), std::out_of_range);

    spin::PulseSequence few = reference_sequence();
    few.n_pulses = 4;  // 3 wait-preceded pulses only
    const auto few_trace = spin::simulate_pulse_train(reference_model(), few, 7);
    CHECK_THROWS_AS(spin::extract_t1(few_trace), std::invalid_argument);
}

TEST_CASE("model and sequence invariants are enforced") {
    spin::PumpModel m = reference_model();
    m.pump_rate = -1.0;
    CHECK_THROWS_AS(spin::validate(m), std::invalid_argument);
    m = reference_model();
    m.t1_spin = 0.0;
    CHECK_THROWS_AS(spin::validate(m), std::invalid_argument);
    m = reference_model();
    m.initial_p_down = 1.2;
    CHECK_THROWS_AS(spin::validate(m), std::invalid_argument);
    m = reference_model();
    m.background = -1.0;
    CHECK_THROWS_AS(spin::validate(m), std::invalid_argument);

    spin::PulseSequence s = reference_sequence();
    s.pulse_length = 0.0;
    CHECK_THROWS_AS(spin::validate(s), std::invalid_argument);
    s = reference_sequence();
    s.n_pulses = 0;
    CHECK_THROWS_AS(spin::validate(s), std::invalid_argument);
    s = reference_sequence();
    s.wait_initial = 0.0;
    CHECK_THROWS_AS(spin::validate(s), std::invalid_argument);
    s = reference_sequence();
    s.wait_increment = -1e-9;
    CHECK_THROWS_AS(spin::validate(s), std::invalid_argument);
    s = reference_sequence();
    s.bin_width = 0.0;
    CHECK_THROWS_AS(spin::validate(s), std::invalid_argument);
}
