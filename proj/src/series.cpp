#include "eitlab/series.hpp"

#include <cmath>
#include <sstream>

#include "eitlab/errors.hpp"

namespace eit {

std::vector<double> LinewidthSeries::powers() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.power_w);
    return out;
}

std::vector<double> LinewidthSeries::fwhms() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.fwhm);
    return out;
}

bool LinewidthSeries::has_sigmas() const {
    if (samples.empty()) return false;
    for (const auto& s : samples)
        if (!s.fwhm_sigma || !(*s.fwhm_sigma > 0)) return false;
    return true;
}

void LinewidthSeries::validate(std::size_t min_samples) const {
    if (samples.size() < min_samples) {
        std::ostringstream os;
        os << "series has " << samples.size() << " samples, at least " << min_samples << " required";
        throw DegenerateData(os.str());
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.power_w) || !std::isfinite(s.fwhm) || !std::isfinite(s.omega_c))
            throw DataError("series: non-finite value");
        if (!(s.power_w > 0)) throw DataError("series: pump powers must be > 0");
        if (s.fwhm_sigma && !(*s.fwhm_sigma >= 0)) throw DataError("series: negative FWHM sigma");
        if (i > 0 && !(s.power_w > samples[i - 1].power_w))
            throw DataError("series: pump powers must be strictly increasing");
    }
}

}  // namespace eit
