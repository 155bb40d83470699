// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "excursion/manifold.hpp"

namespace excursion {

/// Axis-aligned box [0, T_1] x ... x [0, T_N] (Euclidean space or a torus chart).
struct Rectangle {
    std::vector<double> sides;
};

/// Euclidean ball of radius a centred at the origin.
struct Ball {
    double radius = 1.0;
};

/// The whole sphere S^N of the manifold.
struct FullSphere {
    double radius = 1.0;
};

/// The whole flat torus of the manifold.
struct FullTorus {};

/// Equator theta_1 = pi/2 of a 2-sphere (a k = 1 submanifold).
struct GreatCircle {
    double radius = 1.0;
};

using Shape = std::variant<Rectangle, Ball, FullSphere, FullTorus, GreatCircle>;

/// Compact domain D on a catalogue manifold.
class Domain {
public:
    /// Validates shape parameters against the manifold.
    Domain(Manifold manifold, Shape shape);

    [[nodiscard]] const Manifold& manifold() const noexcept { return manifold_; }
    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    /// Intrinsic dimension k of D.
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] bool has_boundary() const noexcept;
    [[nodiscard]] std::string describe() const;

private:
    Manifold manifold_;
    Shape shape_;
    int dim_;
};

/// Lipschitz-Killing curvatures (L_0, ..., L_k).
struct LkVector {
    std::vector<double> values;

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(values.size()) - 1; }
    [[nodiscard]] double volume() const { return values.back(); }
    double operator[](std::size_t j) const { return values[j]; }
};

/// Volume of the unit m-ball, pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

/// Elementary symmetric polynomials e_0..e_n of `x`.
std::vector<double> elementary_symmetric(const std::vector<double>& x);

LkVector lk_curvatures(const Domain& d);

/// (kappa^{j/2} L_j)_j: curvatures under the metric kappa * g.
LkVector rescale_lk(const LkVector& lk, double kappa);

/// Steiner polynomial sum_j omega_{k-j} r^{k-j} L_j(D), the volume of the
/// r-tube around a convex Euclidean body (Rectangle or Ball).
double tube_volume(const Domain& d, double r);

}  // namespace excursion
