// Microbenchmarks for the hot paths: forward models, stochastic simulation,
// fitting and table serialization. Not wired into CTest; run the binary
// directly to compare before/after timings.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "sivcav/cavity.hpp"
#include "sivcav/constants.hpp"
#include "sivcav/g2.hpp"
#include "sivcav/levels.hpp"
#include "sivcav/lindblad.hpp"
#include "sivcav/pipelines.hpp"
#include "sivcav/ple.hpp"
#include "sivcav/rng.hpp"
#include "sivcav/spin_pump.hpp"
#include "sivcav/table_io.hpp"

namespace {

using namespace sivcav;

void bm_cavity_report(benchmark::State& state) {
    cavity::CavityGeometry geom;
    geom.roc = 8e-6;
    geom.wavelength = 736.7e-9;
    cavity::EmitterCouplingParams coupling;
    for (auto _ : state) {
        const auto rep = cavity::cavity_report(geom, 11, coupling, 2700.0);
        benchmark::DoNotOptimize(rep.purcell.purcell_curved);
    }
}
BENCHMARK(bm_cavity_report);

void bm_transition_spectrum(benchmark::State& state) {
    levels::BranchParams ground;
    ground.spin_orbit = 46e9;
    ground.strain_alpha = 0.4e9;
    levels::BranchParams excited;
    excited.spin_orbit = 255e9;
    excited.strain_alpha = 1.1e9;
    excited.orbital_g_quench = 0.1134;
    levels::FieldConfig field;
    field.magnitude = 1.0;
    field.polar_angle = 0.2;
    for (auto _ : state) {
        const auto set = levels::transition_spectrum(ground, excited, field);
        benchmark::DoNotOptimize(set.transitions.front().offset);
    }
}
BENCHMARK(bm_transition_spectrum);

void bm_steady_state(benchmark::State& state) {
    qdyn::TwoLevelParams params;
    params.decay_rate = 1e9;
    params.rabi_frequency = constants::two_pi * 290e6;
    params.pure_dephasing = 1e8;
    params.detuning = 5e7;
    const qdyn::LindbladSystem system = qdyn::two_level_system(params);
    for (auto _ : state) {
        const Eigen::MatrixXcd rho = qdyn::steady_state(system);
        benchmark::DoNotOptimize(rho(1, 1));
    }
}
BENCHMARK(bm_steady_state);

void bm_g2_analytic(benchmark::State& state) {
    qdyn::TwoLevelParams params;
    params.decay_rate = 1.0 / 1.8e-9;
    params.rabi_frequency = constants::two_pi * 290e6;
    std::vector<double> tau(512);
    for (std::size_t i = 0; i < tau.size(); ++i)
        tau[i] = 10e-9 * static_cast<double>(i) / 511.0;
    for (auto _ : state) {
        const auto trace = g2::g2_analytic(params, tau);
        benchmark::DoNotOptimize(trace.g2.back());
    }
}
BENCHMARK(bm_g2_analytic);

void bm_g2_numeric(benchmark::State& state) {
    qdyn::TwoLevelParams params;
    params.decay_rate = 1.0 / 1.8e-9;
    params.rabi_frequency = constants::two_pi * 290e6;
    const qdyn::LindbladSystem system = qdyn::two_level_system(params);
    std::vector<double> tau(64);
    for (std::size_t i = 0; i < tau.size(); ++i)
        tau[i] = 5e-9 * static_cast<double>(i) / 63.0;
    qdyn::IntegratorOptions options;
    options.steps_per_rate = 25.0;
    for (auto _ : state) {
        const auto trace = g2::g2_numeric(system, tau, options);
        benchmark::DoNotOptimize(trace.g2.back());
    }
}
BENCHMARK(bm_g2_numeric);

void bm_poisson_bright(benchmark::State& state) {
    rng::Engine engine(8675309);
    for (auto _ : state) benchmark::DoNotOptimize(engine.poisson(1500.0));
}
BENCHMARK(bm_poisson_bright);

void bm_fit_lorentzian(benchmark::State& state) {
    ple::PleModel model;
    model.zero_power_fwhm = 168e6;
    model.saturation_power = 1.0;
    model.max_count_rate = 30000.0;
    model.background_rate = 300.0;
    std::vector<double> grid(61);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = -1e9 + 2e9 * static_cast<double>(i) / 60.0;
    const ple::Spectrum spec = ple::simulate_scan(model, 0.0, grid, 1.0, 0.05, 4242);
    for (auto _ : state) {
        const auto fit = pipelines::fit_lorentzian(spec.frequency, spec.rate, spec.sigma);
        benchmark::DoNotOptimize(fit.fwhm);
    }
}
BENCHMARK(bm_fit_lorentzian);

void bm_simulate_pulse_train(benchmark::State& state) {
    spin::PumpModel model;
    model.pump_rate = 1.0 / 67e-9 - 1.0 / 350e-9;
    model.t1_spin = 350e-9;
    model.counts_per_population = 5.12e11;
    model.background = 2.56e10;
    spin::PulseSequence seq;
    seq.pulse_length = 750e-9;
    seq.n_pulses = 10;
    seq.wait_initial = 75e-9;
    seq.wait_increment = 75e-9;
    seq.bin_width = 5e-9;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const auto trace = spin::simulate_pulse_train(model, seq, seed++);
        benchmark::DoNotOptimize(trace.counts.back());
    }
}
BENCHMARK(bm_simulate_pulse_train);

io::Table big_table() {
    io::Table t;
    t.column_names = {"x", "y", "sigma"};
    t.columns.assign(3, {});
    rng::Engine engine(13);
    for (int i = 0; i < 2000; ++i) {
        t.columns[0].push_back(i * 1e-9);
        t.columns[1].push_back(engine.normal(100.0, 3.0));
        t.columns[2].push_back(engine.uniform_pos());
    }
    t.metadata = {{"kind", "bench"}, {"seed", "13"}};
    return t;
}

void bm_format_table(benchmark::State& state) {
    const io::Table t = big_table();
    for (auto _ : state) {
        const std::string text = io::format_table(t);
        benchmark::DoNotOptimize(text.size());
    }
}
BENCHMARK(bm_format_table);

void bm_parse_table(benchmark::State& state) {
    const std::string text = io::format_table(big_table());
    for (auto _ : state) {
        const io::Table t = io::parse_table(text);
        benchmark::DoNotOptimize(t.rows());
    }
}
BENCHMARK(bm_parse_table);

}  // namespace

BENCHMARK_MAIN();
