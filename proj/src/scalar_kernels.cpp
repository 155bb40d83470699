// SPDX-License-Identifier: Apache-2.0
#include "excursion/scalar_kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "excursion/error.hpp"

namespace excursion {

double hermite(int j, double x) {
    if (j < 0 || j > kMaxHermiteDegree) {
        throw ValidationError("Hermite degree " + std::to_string(j) + " outside [0, " +
                              std::to_string(kMaxHermiteDegree) + "]");
    }
    if (j == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < j; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double gaussian_tail(double u) {
    return 0.5 * std::erfc(u / std::numbers::sqrt2);
}

double gaussian_tail_scaled(double u) {
    const double phi0 = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    if (u < 5.0) return std::exp(0.5 * u * u) * gaussian_tail(u);
    // Modified Lentz evaluation of phi0 / (u + 1/(u + 2/(u + 3/(u + ...)))).
    constexpr double tiny = 1e-300;
    double f = u;
    double c = u;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        d = u + k * d;
        d = d == 0.0 ? tiny : 1.0 / d;
        c = u + k / c;
        if (c == 0.0) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return phi0 / f;
}

double beta_kernel(int j, double u) {
    if (j < 0) throw ValidationError("beta kernel index must be non-negative");
    if (j == 0) return gaussian_tail(u);
    const double two_pi = 2.0 * std::numbers::pi;
    return std::pow(two_pi, -0.5 * (j + 1)) * hermite(j - 1, u) * std::exp(-0.5 * u * u);
}

}  // namespace excursion
