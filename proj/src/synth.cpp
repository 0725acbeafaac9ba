#include "eitlab/synth.hpp"

#include <cmath>

#include "eitlab/errors.hpp"

namespace eit {

ResonanceScan add_scan_noise(ResonanceScan scan, double fraction, double cell_length,
                             NoiseSource& rng) {
    if (!(fraction >= 0)) throw ConfigError("noise fraction must be >= 0");
    if (fraction == 0.0) return scan;
    for (double& a : scan.absorption) a += fraction * std::abs(a) * rng.normal();
    if (!scan.transmission.empty()) {
        for (std::size_t i = 0; i < scan.transmission.size(); ++i)
            scan.transmission[i] = std::exp(-scan.absorption[i] * cell_length);
    }
    return scan;
}

LinewidthSeries add_series_noise(LinewidthSeries series, double fraction, NoiseSource& rng) {
    if (!(fraction >= 0)) throw ConfigError("noise fraction must be >= 0");
    if (fraction == 0.0) return series;
    for (auto& s : series.samples) {
        const double sigma = fraction * std::abs(s.fwhm);
        s.fwhm += sigma * rng.normal();
        s.fwhm_sigma = sigma;
    }
    return series;
}

}  // namespace eit
