// SPDX-License-Identifier: Apache-2.0
#include "excursion/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "excursion/error.hpp"

namespace excursion {
namespace {

constexpr double kPoleTolerance = 1e-12;

// Chart-0 hyperspherical embedding of the unit sphere S^N into R^{N+1}.
Eigen::VectorXd unit_sphere_chart0(const Eigen::VectorXd& theta) {
    const Eigen::Index n = theta.size();
    Eigen::VectorXd x(n + 1);
    double scale = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        x[n - k] = scale * std::cos(theta[k]);
        scale *= std::sin(theta[k]);
    }
    x[0] = scale * std::cos(theta[n - 1]);
    x[1] = scale * std::sin(theta[n - 1]);
    return x;
}

// Chart 1 is chart 0 composed with the cyclic shift that moves the polar
// axis from the last ambient coordinate to the first.
Eigen::VectorXd chart1_from_chart0_frame(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd y(n);
    y[0] = x[n - 1];
    y.tail(n - 1) = x.head(n - 1);
    return y;
}

Eigen::VectorXd chart0_frame_from_chart1(const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    Eigen::VectorXd x(n);
    x.head(n - 1) = y.tail(n - 1);
    x[n - 1] = y[0];
    return x;
}

Eigen::VectorXd unit_sphere_point(const ChartPoint& p) {
    Eigen::VectorXd x = unit_sphere_chart0(p.coords);
    return p.chart == 0 ? x : chart1_from_chart0_frame(x);
}

double wrapped_delta(double a, double b, double period) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

// Angle between two vectors of equal norm, stable for near-coincident and
// near-antipodal pairs.
double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace

ChartPoint::ChartPoint(std::initializer_list<double> x, int chart_id) : chart(chart_id) {
    coords.resize(static_cast<Eigen::Index>(x.size()));
    Eigen::Index i = 0;
    for (double v : x) coords[i++] = v;
}

Manifold Manifold::euclidean(int dim) {
    if (dim < 1) throw ValidationError("dimension must be >= 1", "manifold.dim");
    return Manifold(ManifoldKind::kEuclidean, dim, {}, 0.0);
}

Manifold Manifold::flat_torus(std::vector<double> periods) {
    if (periods.empty()) throw ValidationError("torus needs at least one period", "manifold.periods");
    for (double p : periods) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw ValidationError("torus periods must be finite and > 0", "manifold.periods");
        }
    }
    const int dim = static_cast<int>(periods.size());
    return Manifold(ManifoldKind::kFlatTorus, dim, std::move(periods), 0.0);
}

Manifold Manifold::sphere(int dim, double radius) {
    if (dim < 1) throw ValidationError("dimension must be >= 1", "manifold.dim");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ValidationError("sphere radius must be finite and > 0", "manifold.radius");
    }
    return Manifold(ManifoldKind::kSphere, dim, {}, radius);
}

std::string Manifold::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ManifoldKind::kEuclidean:
            os << "euclidean(" << dim_ << ")";
            break;
        case ManifoldKind::kFlatTorus:
            os << "flat_torus(";
            for (std::size_t i = 0; i < periods_.size(); ++i) os << (i ? "," : "") << periods_[i];
            os << ")";
            break;
        case ManifoldKind::kSphere:
            os << "sphere(" << dim_ << ",r=" << radius_ << ")";
            break;
    }
    return os.str();
}

void check_chart_point(const Manifold& m, const ChartPoint& p) {
    if (p.coords.size() != m.dim()) {
        throw ValidationError("chart point has " + std::to_string(p.coords.size()) +
                              " coordinates, manifold dimension is " + std::to_string(m.dim()));
    }
    if (!p.coords.allFinite()) throw ValidationError("chart point coordinates must be finite");
    if (m.kind() != ManifoldKind::kSphere) {
        if (p.chart != 0) throw ValidationError("manifold has a single chart (id 0)");
        return;
    }
    if (p.chart != 0 && p.chart != 1) throw ValidationError("sphere chart id must be 0 or 1");
    for (Eigen::Index k = 0; k + 1 < p.coords.size(); ++k) {
        const double t = p.coords[k];
        if (t <= kPoleTolerance || t >= std::numbers::pi - kPoleTolerance) {
            throw DegenerateChartError("polar angle theta_" + std::to_string(k + 1) +
                                       " outside (0, pi): chart degenerates");
        }
    }
}

Eigen::MatrixXd metric_tensor(const Manifold& m, const ChartPoint& p) {
    check_chart_point(m, p);
    const int n = m.dim();
    if (m.kind() != ManifoldKind::kSphere) return Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    double factor = m.radius() * m.radius();
    for (int k = 0; k < n; ++k) {
        g(k, k) = factor;
        if (k + 1 < n) factor *= std::pow(std::sin(p.coords[k]), 2);
    }
    return g;
}

Eigen::MatrixXd metric_sqrt(const Manifold& m, const ChartPoint& p) {
    const Eigen::MatrixXd g = metric_tensor(m, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
        throw DegenerateChartError("metric tensor is not positive definite");
    }
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

double geodesic_distance(const Manifold& m, const ChartPoint& p, const ChartPoint& q) {
    check_chart_point(m, p);
    check_chart_point(m, q);
    switch (m.kind()) {
        case ManifoldKind::kEuclidean:
            return (p.coords - q.coords).norm();
        case ManifoldKind::kFlatTorus: {
            double sum = 0.0;
            for (int i = 0; i < m.dim(); ++i) {
                const double d = wrapped_delta(p.coords[i], q.coords[i], m.periods()[i]);
                sum += d * d;
            }
            return std::sqrt(sum);
        }
        case ManifoldKind::kSphere:
            return m.radius() * angle_between(unit_sphere_point(p), unit_sphere_point(q));
    }
    return 0.0;
}

double chart_quadratic_form(const Manifold& m, const ChartPoint& p, const ChartPoint& q) {
    check_chart_point(m, q);
    if (p.chart != q.chart) throw ValidationError("points must share a chart");
    return (metric_sqrt(m, p) * (q.coords - p.coords)).norm();
}

Eigen::VectorXd embed(const Manifold& m, const ChartPoint& p) {
    check_chart_point(m, p);
    if (m.kind() != ManifoldKind::kSphere) return p.coords;
    return m.radius() * unit_sphere_point(p);
}

Eigen::VectorXd ambient_embedding(const Manifold& m, const ChartPoint& p) {
    if (m.kind() != ManifoldKind::kFlatTorus) return embed(m, p);
    check_chart_point(m, p);
    const int n = m.dim();
    Eigen::VectorXd x(2 * n);
    for (int i = 0; i < n; ++i) {
        const double period = m.periods()[i];
        const double angle = 2.0 * std::numbers::pi * p.coords[i] / period;
        const double scale = period / (2.0 * std::numbers::pi);
        x[2 * i] = scale * std::cos(angle);
        x[2 * i + 1] = scale * std::sin(angle);
    }
    return x;
}

double chordal_distance(const Manifold& m, const ChartPoint& p, const ChartPoint& q) {
    if (m.kind() == ManifoldKind::kFlatTorus) {
        check_chart_point(m, p);
        check_chart_point(m, q);
        // |e(x) - e(y)|^2 = sum_i (P_i/pi)^2 sin^2(pi dx_i / P_i), without cancellation.
        double sum = 0.0;
        for (int i = 0; i < m.dim(); ++i) {
            const double period = m.periods()[i];
            const double s = period / std::numbers::pi *
                             std::sin(std::numbers::pi * (p.coords[i] - q.coords[i]) / period);
            sum += s * s;
        }
        return std::sqrt(sum);
    }
    return (ambient_embedding(m, p) - ambient_embedding(m, q)).norm();
}

ChartPoint sphere_point_from_ambient(const Manifold& m, const Eigen::VectorXd& x) {
    if (m.kind() != ManifoldKind::kSphere) throw ValidationError("manifold is not a sphere");
    const int n = m.dim();
    if (x.size() != n + 1) throw ValidationError("ambient point has wrong dimension");
    const Eigen::VectorXd unit = x / x.norm();

    auto angles = [n](const Eigen::VectorXd& v) {
        Eigen::VectorXd theta(n);
        for (int k = 0; k + 1 < n; ++k) {
            theta[k] = std::atan2(v.head(n - k).norm(), v[n - k]);
        }
        theta[n - 1] = std::atan2(v[1], v[0]);
        return theta;
    };

    Eigen::VectorXd theta = angles(unit);
    bool near_pole = false;
    for (int k = 0; k + 1 < n; ++k) {
        near_pole = near_pole || std::sin(theta[k]) < 0.5;
    }
    if (!near_pole) return ChartPoint(theta, 0);
    return ChartPoint(angles(chart0_frame_from_chart1(unit)), 1);
}

}  // namespace excursion
