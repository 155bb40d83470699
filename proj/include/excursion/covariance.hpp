// SPDX-License-Identifier: Apache-2.0
//
// Covariance families on catalogue manifolds.
//
// Each model exposes two kernels:
//   covariance()        the model as defined, a function of d_M(p, q);
//   field_covariance()  the kernel actually used to simulate the field.
// They coincide wherever the geodesic kernel is positive semidefinite. On
// flat tori (and for squared-exponential fields on spheres) the geodesic
// kernel is not, so the simulated field uses the same profile on the chordal
// distance of the ambient embedding instead. chord/d_M -> 1 as d_M -> 0, so
// rho'(0) and the local (c, alpha) expansion are unchanged.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "excursion/manifold.hpp"

namespace excursion {

struct SquaredExponential {
    double length_scale = 1.0;
};

/// C(p, q) = sum_n b_n <p, q>^n on the unit-normalised sphere embedding.
struct SphereSchoenberg {
    std::vector<double> coefficients;
};

using SmoothFamily = std::variant<SquaredExponential, SphereSchoenberg>;

/// Centered unit-variance isotropic model C(p, q) = rho(d_M^2(p, q)).
class SmoothIsotropicModel {
public:
    /// Validates unit variance, family/manifold compatibility and rho'(0) < 0.
    SmoothIsotropicModel(Manifold manifold, SmoothFamily family);

    [[nodiscard]] const Manifold& manifold() const noexcept { return manifold_; }
    [[nodiscard]] const SmoothFamily& family() const noexcept { return family_; }

    [[nodiscard]] double covariance(const ChartPoint& p, const ChartPoint& q) const;
    [[nodiscard]] double field_covariance(const ChartPoint& p, const ChartPoint& q) const;

    /// rho(r) as a function of the squared geodesic distance r.
    [[nodiscard]] double rho(double squared_distance) const;
    [[nodiscard]] double rho_prime_0() const noexcept { return rho_prime_0_; }

    [[nodiscard]] std::string describe() const;

private:
    Manifold manifold_;
    SmoothFamily family_;
    double rho_prime_0_ = 0.0;
};

/// Returns rho'(0) of `model`.
inline double rho_prime_0(const SmoothIsotropicModel& model) { return model.rho_prime_0(); }

/// exp(-c d^alpha), the simulable representative of the local condition.
struct PoweredExponential {};

/// exp(-c ||phi(q) - phi(p)||^alpha) in raw chart coordinates. Flat
/// manifolds only (G = I, so the local expansion matches on the chart).
struct StableOnChart {};

using LocalFamily = std::variant<std::monostate, PoweredExponential, StableOnChart, SmoothIsotropicModel>;

/// Model satisfying C(p, q) = 1 - c d_M^alpha(p, q) (1 + o(1)), optionally
/// carrying a full covariance family that realises it.
class LocallyIsotropicModel {
public:
    LocallyIsotropicModel(Manifold manifold, double c, double alpha, LocalFamily family = {});

    /// Smooth model viewed locally: alpha = 2, c = -rho'(0); keeps the smooth
    /// model as its full family.
    static LocallyIsotropicModel from_smooth(const SmoothIsotropicModel& model);

    [[nodiscard]] const Manifold& manifold() const noexcept { return manifold_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const LocalFamily& family() const noexcept { return family_; }
    [[nodiscard]] bool has_family() const noexcept {
        return !std::holds_alternative<std::monostate>(family_);
    }

    /// Throws ValidationError when no family is attached.
    [[nodiscard]] double covariance(const ChartPoint& p, const ChartPoint& q) const;
    [[nodiscard]] double field_covariance(const ChartPoint& p, const ChartPoint& q) const;

    [[nodiscard]] std::string describe() const;

private:
    Manifold manifold_;
    double c_;
    double alpha_;
    LocalFamily family_;
};

/// (c, alpha) of the local expansion.
std::pair<double, double> local_expansion(const LocallyIsotropicModel& model);

/// (c, alpha) = (-rho'(0), 2) for a smooth model.
std::pair<double, double> local_expansion(const SmoothIsotropicModel& model);

/// (1 - C(p, q_k)) / (c d_M^alpha(p, q_k)) for each q_k. Entries with
/// d_M = 0 are NaN. Requires an attached family.
std::vector<double> expansion_ratio_check(const LocallyIsotropicModel& model, const ChartPoint& p,
                                          const std::vector<ChartPoint>& q_sequence);

}  // namespace excursion
