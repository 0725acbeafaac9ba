#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "eitlab/errors.hpp"

namespace eit {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
    /// Gaussian profiles are integrated over [−k W_d, k W_d] with this k.
    double truncation_half_widths = 8.0;
};

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;
    int subdivisions = 0;
};

namespace detail {

// 21-point Kronrod rule with the embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077880053958365, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    double abs_value;  // ∫|f| estimate, for the round-off floor
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const std::complex<double> fc = f(center);
    std::complex<double> kronrod = kWgk[10] * fc;
    std::complex<double> gauss{0.0, 0.0};
    double abs_sum = kWgk[10] * std::abs(fc);
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const std::complex<double> f1 = f(center - dx);
        const std::complex<double> f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double width = std::abs(half);
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * width};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (G10/K21) integration of a complex-valued
/// integrand over [a, b]. `breakpoints` strictly inside (a, b) seed the
/// initial partition together with `initial_panels` equal pieces. Throws
/// QuadratureFailure when the tolerance is not met within max_subdivisions.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints,
                                    const QuadratureConfig& cfg, int initial_panels = 8) {
    std::vector<double> cuts;
    cuts.reserve(breakpoints.size() + initial_panels + 1);
    for (int i = 0; i <= initial_panels; ++i) cuts.push_back(a + (b - a) * i / initial_panels);
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Panel> heap;
    std::complex<double> total{0.0, 0.0};
    double error = 0.0;
    double abs_total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::gauss_kronrod_21(f, cuts[i], cuts[i + 1]);
        total += p.value;
        error += p.error;
        abs_total += p.abs_value;
        heap.push(p);
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto tolerance = [&] {
        return std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total), 50.0 * eps * abs_total});
    };

    int subdivisions = 0;
    while (error > tolerance()) {
        if (subdivisions >= cfg.max_subdivisions) {
            std::ostringstream os;
            os << "adaptive quadrature did not reach tolerance after " << subdivisions
               << " subdivisions (error " << error << ", target " << tolerance() << ")";
            throw QuadratureFailure(os.str());
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureFailure("adaptive quadrature: panel width reached machine resolution");
        }
        auto left = detail::gauss_kronrod_21(f, worst.a, mid);
        auto right = detail::gauss_kronrod_21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_total += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum from the panels so the result does not carry incremental round-off.
    std::complex<double> sum{0.0, 0.0};
    double err_sum = 0.0;
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& p : panels) {
        sum += p.value;
        err_sum += p.error;
    }
    return {sum, err_sum, subdivisions};
}

}  // namespace eit
