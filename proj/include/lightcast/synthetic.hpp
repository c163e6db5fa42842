#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lightcast/frame.hpp"
#include "lightcast/timeutil.hpp"

namespace lightcast {

/// Gaussian sampler built on mt19937_64 with an explicit Box-Muller transform,
/// so the stream is identical across standard library implementations.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

struct SyntheticConfig {
    std::size_t n_rows = 6000;
    std::uint64_t seed = 42;
    std::int64_t start_timestamp = timestamp_from_civil(2021, 1, 1);
    double weekly_amplitude = 14.0;
    double yearly_amplitude = 22.0;
    double daily_amplitude = 2.0;
    double noise_ar = 0.85;   // AR(1) coefficient of the latent noise
    double noise_scale = 3.0; // innovation standard deviation
};

/// Seeded Beijing-like hourly panel: a latent pollution factor with weekly,
/// yearly and mild daily harmonics plus AR(1) noise drives the particulate
/// and gas channels with different couplings; temperature and dew point follow
/// the yearly cycle. All channels are cross-linked through the latent factor.
inline TimeSeriesFrame generate_synthetic(const SyntheticConfig& config) {
    if (config.n_rows < 2) throw ValueError("generate_synthetic: need at least 2 rows");
    GaussianSampler gauss(config.seed);

    const std::vector<std::string> columns = {"pm2_5", "pm10", "co",   "no",        "no2",
                                              "so2",   "nh3",  "o3",   "temp",      "dew_point"};
    std::vector<std::int64_t> timestamps(config.n_rows);
    std::vector<double> values;
    values.reserve(config.n_rows * columns.size());

    const double two_pi = 2.0 * std::numbers::pi;
    double ar_noise = 0;
    for (std::size_t i = 0; i < config.n_rows; ++i) {
        timestamps[i] = config.start_timestamp + static_cast<std::int64_t>(i) * kSecondsPerHour;
        const double hour = static_cast<double>(timestamps[i]) / kSecondsPerHour;

        ar_noise = config.noise_ar * ar_noise + config.noise_scale * gauss.normal();
        const double weekly = std::sin(two_pi * hour / 168.0);
        const double yearly = std::sin(two_pi * hour / 8766.0);
        const double daily = std::sin(two_pi * hour / 24.0);
        const double latent = 55.0 + config.weekly_amplitude * weekly +
                              config.yearly_amplitude * yearly + config.daily_amplitude * daily +
                              ar_noise;

        const double pm25 = std::max(1.0, 0.85 * latent + 4.0 + 1.5 * gauss.normal());
        const double pm10 = std::max(1.0, 1.35 * latent + 10.0 + 2.5 * gauss.normal());
        const double co = std::max(50.0, 420.0 + 7.5 * latent + 25.0 * gauss.normal());
        const double no = std::max(0.1, 2.0 + 0.35 * latent + 1.2 * gauss.normal());
        const double no2 = std::max(0.5, 8.0 + 0.55 * latent + 2.0 * gauss.normal());
        const double so2 = std::max(0.5, 4.0 + 0.28 * latent + 1.5 * gauss.normal());
        const double nh3 = std::max(0.1, 1.5 + 0.10 * latent + 0.8 * gauss.normal());
        const double o3 = std::max(1.0, 70.0 - 0.45 * latent + 9.0 * daily + 4.0 * gauss.normal());
        const double temp = 12.0 + 16.0 * yearly + 3.0 * daily + 1.2 * gauss.normal();
        const double dew = temp - 5.0 + 1.0 * gauss.normal();

        for (double v : {pm25, pm10, co, no, no2, so2, nh3, o3, temp, dew}) values.push_back(v);
    }
    return TimeSeriesFrame(std::move(timestamps), columns, std::move(values));
}

} // namespace lightcast
