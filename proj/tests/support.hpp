// SPDX-License-Identifier: Apache-2.0
//
// Small helpers shared by the test suites: a seeded generator for property
// tests and relative comparisons.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace excursion::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>()(engine_); }

    Eigen::VectorXd uniform_vector(int n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v(n);
        do {
            for (int i = 0; i < n; ++i) v[i] = normal();
        } while (v.norm() < 1e-8);
        return v.normalized();
    }

private:
    std::mt19937_64 engine_;
};

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace excursion::testing
