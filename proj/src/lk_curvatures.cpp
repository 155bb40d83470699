// SPDX-License-Identifier: Apache-2.0
#include "excursion/lk_curvatures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "excursion/error.hpp"

namespace excursion {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("must be finite and > 0", field);
}

void require_matching_radius(double shape_radius, const Manifold& m) {
    require_positive(shape_radius, "domain.radius");
    if (std::abs(shape_radius - m.radius()) > 1e-12 * m.radius()) {
        throw ValidationError("radius does not match the sphere manifold radius", "domain.radius");
    }
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Surface area of the unit sphere S^{m-1} in R^m.
double unit_sphere_area(int m) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

}  // namespace

Domain::Domain(Manifold manifold, Shape shape) : manifold_(std::move(manifold)), shape_(std::move(shape)) {
    const int n = manifold_.dim();
    dim_ = std::visit(
        overloaded{
            [&](const Rectangle& r) {
                if (manifold_.kind() == ManifoldKind::kSphere) {
                    throw ValidationError("rectangle requires a flat manifold", "domain.shape");
                }
                if (static_cast<int>(r.sides.size()) != n) {
                    throw ValidationError("rectangle needs one side per manifold dimension", "domain.sides");
                }
                for (std::size_t i = 0; i < r.sides.size(); ++i) {
                    require_positive(r.sides[i], "domain.sides");
                    if (manifold_.kind() == ManifoldKind::kFlatTorus && r.sides[i] > manifold_.periods()[i]) {
                        throw ValidationError("rectangle side exceeds the torus period", "domain.sides");
                    }
                }
                return n;
            },
            [&](const Ball& b) {
                if (manifold_.kind() != ManifoldKind::kEuclidean) {
                    throw ValidationError("ball requires Euclidean space", "domain.shape");
                }
                require_positive(b.radius, "domain.radius");
                return n;
            },
            [&](const FullSphere& s) {
                if (manifold_.kind() != ManifoldKind::kSphere) {
                    throw ValidationError("full_sphere requires a sphere manifold", "domain.shape");
                }
                require_matching_radius(s.radius, manifold_);
                return n;
            },
            [&](const FullTorus&) {
                if (manifold_.kind() != ManifoldKind::kFlatTorus) {
                    throw ValidationError("full_torus requires a flat torus manifold", "domain.shape");
                }
                return n;
            },
            [&](const GreatCircle& g) {
                if (manifold_.kind() != ManifoldKind::kSphere || n != 2) {
                    throw ValidationError("great_circle requires a 2-sphere", "domain.shape");
                }
                require_matching_radius(g.radius, manifold_);
                return 1;
            },
        },
        shape_);
}

bool Domain::has_boundary() const noexcept {
    return std::holds_alternative<Rectangle>(shape_) || std::holds_alternative<Ball>(shape_);
}

std::string Domain::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Rectangle& r) {
                       os << "rectangle(";
                       for (std::size_t i = 0; i < r.sides.size(); ++i) os << (i ? "," : "") << r.sides[i];
                       os << ")";
                   },
                   [&](const Ball& b) { os << "ball(a=" << b.radius << ")"; },
                   [&](const FullSphere& s) { os << "full_sphere(r=" << s.radius << ")"; },
                   [&](const FullTorus&) { os << "full_torus"; },
                   [&](const GreatCircle& g) { os << "great_circle(r=" << g.radius << ")"; },
               },
               shape_);
    os << " in " << manifold_.describe();
    return os.str();
}

double unit_ball_volume(int m) {
    if (m < 0) throw ValidationError("ball dimension must be >= 0");
    return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

std::vector<double> elementary_symmetric(const std::vector<double>& x) {
    std::vector<double> e(x.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j > 0; --j) e[j] += x[i] * e[j - 1];
    }
    return e;
}

LkVector lk_curvatures(const Domain& d) {
    const int n = d.manifold().dim();
    return std::visit(
        overloaded{
            [&](const Rectangle& r) { return LkVector{elementary_symmetric(r.sides)}; },
            [&](const Ball& b) {
                std::vector<double> l(n + 1);
                for (int j = 0; j <= n; ++j) {
                    l[j] = binomial(n, j) * unit_ball_volume(n) / unit_ball_volume(n - j) * std::pow(b.radius, j);
                }
                return LkVector{l};
            },
            [&](const FullSphere& s) {
                // Intrinsic curvatures of S^N: nonzero only for N - j even.
                std::vector<double> l(n + 1, 0.0);
                for (int j = n; j >= 0; j -= 2) {
                    l[j] = 2.0 * binomial(n, j) * unit_sphere_area(n + 1) / unit_sphere_area(n + 1 - j) *
                           std::pow(s.radius, j);
                }
                return LkVector{l};
            },
            [&](const FullTorus&) {
                std::vector<double> l(n + 1, 0.0);
                double vol = 1.0;
                for (double p : d.manifold().periods()) vol *= p;
                l[n] = vol;
                return LkVector{l};
            },
            [&](const GreatCircle& g) { return LkVector{{0.0, 2.0 * std::numbers::pi * g.radius}}; },
        },
        d.shape());
}

LkVector rescale_lk(const LkVector& lk, double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ValidationError("degenerate field: kappa = -2 rho'(0) must be > 0");
    }
    LkVector out = lk;
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] *= std::pow(kappa, 0.5 * j);
    return out;
}

double tube_volume(const Domain& d, double r) {
    if (d.manifold().kind() != ManifoldKind::kEuclidean ||
        !(std::holds_alternative<Rectangle>(d.shape()) || std::holds_alternative<Ball>(d.shape()))) {
        throw ValidationError("tube volume is defined for convex Euclidean shapes only", "domain.shape");
    }
    if (!(r >= 0.0)) throw ValidationError("tube radius must be >= 0");
    const LkVector lk = lk_curvatures(d);
    const int k = lk.dim();
    double vol = 0.0;
    for (int j = 0; j <= k; ++j) vol += unit_ball_volume(k - j) * std::pow(r, k - j) * lk[j];
    return vol;
}

}  // namespace excursion
