#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eit {

struct LinewidthSample {
    double power_w = 0.0;
    double omega_c = 0.0;  ///< rad/s at the cell entrance (0 if unknown)
    double fwhm = 0.0;     ///< rad/s
    std::optional<double> fwhm_sigma;  ///< rad/s
};

/// FWHM versus pump power, the input of the linear and exchange fits.
struct LinewidthSeries {
    std::vector<LinewidthSample> samples;
    std::optional<double> temperature;  ///< K
    std::string configuration = "zeeman";  ///< zeeman | hyperfine
    std::string cell_label;

    std::size_t size() const { return samples.size(); }
    std::vector<double> powers() const;
    std::vector<double> fwhms() const;
    /// True when every sample carries a positive sigma.
    bool has_sigmas() const;

    /// Throws DegenerateData/DataError when there are fewer than
    /// `min_samples` samples, powers are not strictly increasing or positive,
    /// or values are not finite.
    void validate(std::size_t min_samples) const;
};

}  // namespace eit
