#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace eit {

/// The single seedable generator used for synthetic data. mt19937_64 output
/// is fixed by the standard; the uniform and normal transforms are written out
/// here so results do not depend on the standard library's distributions.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal deviate (Box–Muller, second value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace eit
