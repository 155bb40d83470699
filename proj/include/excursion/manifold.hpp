// SPDX-License-Identifier: Apache-2.0
//
// Catalogue manifolds with closed-form charts, metric tensors and geodesic
// distances: Euclidean space, flat tori and round spheres.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace excursion {

enum class ManifoldKind { kEuclidean, kFlatTorus, kSphere };

/// A point in local coordinates of one chart of a manifold.
///
/// Sphere charts use hyperspherical angles (theta_1, ..., theta_N), with
/// theta_1..theta_{N-1} in (0, pi) and theta_N periodic. Chart 0 has its
/// polar axis along the last ambient axis; chart 1 along the first, so the
/// two charts together cover the sphere. Euclidean space and tori have a
/// single chart (id 0).
struct ChartPoint {
    int chart = 0;
    Eigen::VectorXd coords;

    ChartPoint() = default;
    explicit ChartPoint(Eigen::VectorXd x, int chart_id = 0)
        : chart(chart_id), coords(std::move(x)) {}
    ChartPoint(std::initializer_list<double> x, int chart_id = 0);
};

/// Immutable description of a catalogue manifold.
class Manifold {
public:
    static Manifold euclidean(int dim);
    static Manifold flat_torus(std::vector<double> periods);
    static Manifold sphere(int dim, double radius);

    [[nodiscard]] ManifoldKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<double>& periods() const noexcept { return periods_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }

    /// Short human-readable identifier, e.g. "sphere(2,r=1)".
    [[nodiscard]] std::string describe() const;

    friend bool operator==(const Manifold&, const Manifold&) = default;

private:
    Manifold(ManifoldKind kind, int dim, std::vector<double> periods, double radius)
        : kind_(kind), dim_(dim), periods_(std::move(periods)), radius_(radius) {}

    ManifoldKind kind_;
    int dim_;
    std::vector<double> periods_;
    double radius_;
};

/// Throws DegenerateChartError / ValidationError if `p` is not a valid point.
void check_chart_point(const Manifold& m, const ChartPoint& p);

/// Metric tensor G(p) in the chart of `p`.
Eigen::MatrixXd metric_tensor(const Manifold& m, const ChartPoint& p);

/// Symmetric positive-definite square root of G(p) (eigendecomposition).
Eigen::MatrixXd metric_sqrt(const Manifold& m, const ChartPoint& p);

/// Riemannian distance d_M(p, q). Points may live in different sphere charts.
double geodesic_distance(const Manifold& m, const ChartPoint& p, const ChartPoint& q);

/// ||G^{1/2}(p) (phi(q) - phi(p))||, the first-order chart approximation of
/// d_M(p, q). Both points must be in the same chart.
double chart_quadratic_form(const Manifold& m, const ChartPoint& p, const ChartPoint& q);

/// Standard embedding: coordinates for Euclidean space and tori, the point of
/// the radius-r sphere in R^{N+1} for spheres.
Eigen::VectorXd embed(const Manifold& m, const ChartPoint& p);

/// Isometric-in-the-small embedding used for chordal distances: identity for
/// Euclidean space, the flat (Clifford) torus in R^{2N} for tori, and `embed`
/// for spheres.
Eigen::VectorXd ambient_embedding(const Manifold& m, const ChartPoint& p);

/// Euclidean distance between ambient embeddings. Equals d_M on Euclidean
/// space; chord/d_M -> 1 as d_M -> 0 on tori and spheres.
double chordal_distance(const Manifold& m, const ChartPoint& p, const ChartPoint& q);

/// Inverse of `embed` for spheres: chart-0 coordinates of a point of the
/// sphere given in ambient coordinates (falls back to chart 1 near the poles).
ChartPoint sphere_point_from_ambient(const Manifold& m, const Eigen::VectorXd& x);

}  // namespace excursion
