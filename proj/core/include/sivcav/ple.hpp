#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sivcav::ple {

// Resonant-excitation lineshape model: Lorentzian line that power-broadens as
// sqrt(1 + s) and a count rate that saturates as s / (1 + s).
struct PleModel {
    double zero_power_fwhm = 0.0;    // [Hz]
    double saturation_power = 0.0;   // [W] (any consistent power unit)
    double max_count_rate = 0.0;     // [counts/s], the s -> inf asymptote
    double background_rate = 0.0;    // [counts/s]
};

void validate(const PleModel& model);

double power_broadened_fwhm(double zero_power_fwhm, double saturation);
double saturated_rate(double max_rate, double saturation, double background);

// Peak-normalised Lorentzian.
double lorentzian(double x, double center, double fwhm);

// On-resonance expected detector rate at the given saturation parameter.
double expected_peak_rate(const PleModel& model, double saturation);

// Expected rate at detuning (frequency - line center), including broadening.
double expected_rate(const PleModel& model, double detuning, double saturation);

struct Spectrum {
    std::vector<double> frequency;  // [Hz], absolute or offset as supplied
    std::vector<double> rate;       // [counts/s]
    std::vector<double> sigma;      // [counts/s], shot-noise estimate
    std::map<std::string, std::string> metadata;
};

// Synthesize one PLE scan: expected counts per dwell window, Poisson draw,
// converted back to a rate with sigma = sqrt(counts)/dwell (floor of one
// count keeps empty bins usable as fit weights).
Spectrum simulate_scan(const PleModel& model, double line_center,
                       std::span<const double> frequency, double power, double dwell_time,
                       std::uint64_t seed);

}  // namespace sivcav::ple
