#pragma once

#include "eitlab/lineshape.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/series.hpp"

namespace eit {

/// Adds Gaussian noise with σ_i = fraction·|absorption_i| to the absorption
/// column and recomputes transmission = exp(−absorption·cell_length) when a
/// transmission column is present. fraction = 0 returns the scan unchanged.
ResonanceScan add_scan_noise(ResonanceScan scan, double fraction, double cell_length,
                             NoiseSource& rng);

/// Adds Gaussian noise with σ_i = fraction·fwhm_i to each width and records
/// that σ as the sample's fwhm_sigma (when fraction > 0).
LinewidthSeries add_series_noise(LinewidthSeries series, double fraction, NoiseSource& rng);

}  // namespace eit
