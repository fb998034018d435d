#include "sivcav/ple.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sivcav/rng.hpp"

namespace sivcav::ple {

void validate(const PleModel& model) {
    if (!(model.zero_power_fwhm > 0.0)) throw std::invalid_argument("linewidth must be positive");
    if (!(model.saturation_power > 0.0))
        throw std::invalid_argument("saturation power must be positive");
    if (!(model.max_count_rate > 0.0)) throw std::invalid_argument("peak rate must be positive");
    if (model.background_rate < 0.0) throw std::invalid_argument("background must be non-negative");
}

double power_broadened_fwhm(double zero_power_fwhm, double saturation) {
    if (!(zero_power_fwhm > 0.0)) throw std::invalid_argument("linewidth must be positive");
    if (saturation < 0.0) throw std::invalid_argument("saturation parameter must be non-negative");
    return zero_power_fwhm * std::sqrt(1.0 + saturation);
}

double saturated_rate(double max_rate, double saturation, double background) {
    if (max_rate < 0.0 || background < 0.0) throw std::invalid_argument("rates must be non-negative");
    if (saturation < 0.0) throw std::invalid_argument("saturation parameter must be non-negative");
    return max_rate * saturation / (1.0 + saturation) + background;
}

double lorentzian(double x, double center, double fwhm) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("linewidth must be positive");
    const double half = 0.5 * fwhm;
    const double d = x - center;
    return half * half / (d * d + half * half);
}

double expected_peak_rate(const PleModel& model, double saturation) {
    validate(model);
    return saturated_rate(model.max_count_rate, saturation, model.background_rate);
}

double expected_rate(const PleModel& model, double detuning, double saturation) {
    validate(model);
    const double fwhm = power_broadened_fwhm(model.zero_power_fwhm, saturation);
    const double peak = model.max_count_rate * saturation / (1.0 + saturation);
    return peak * lorentzian(detuning, 0.0, fwhm) + model.background_rate;
}

Spectrum simulate_scan(const PleModel& model, double line_center,
                       std::span<const double> frequency, double power, double dwell_time,
                       std::uint64_t seed) {
    validate(model);
    if (frequency.empty()) throw std::invalid_argument("empty frequency grid");
    if (!(power >= 0.0)) throw std::invalid_argument("power must be non-negative");
    if (!(dwell_time > 0.0)) throw std::invalid_argument("dwell time must be positive");

    const double s = power / model.saturation_power;
    rng::Engine engine(seed);

    Spectrum out;
    out.frequency.assign(frequency.begin(), frequency.end());
    out.rate.resize(frequency.size());
    out.sigma.resize(frequency.size());
    for (std::size_t i = 0; i < frequency.size(); ++i) {
        const double mean = expected_rate(model, frequency[i] - line_center, s) * dwell_time;
        const double counts = static_cast<double>(engine.poisson(mean));
        out.rate[i] = counts / dwell_time;
        out.sigma[i] = std::sqrt(std::max(counts, 1.0)) / dwell_time;
    }
    out.metadata["dwell_s"] = std::to_string(dwell_time);
    out.metadata["power"] = std::to_string(power);
    out.metadata["saturation"] = std::to_string(s);
    out.metadata["seed"] = std::to_string(seed);
    return out;
}

}  // namespace sivcav::ple
