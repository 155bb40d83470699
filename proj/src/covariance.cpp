// SPDX-License-Identifier: Apache-2.0
#include "excursion/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "excursion/error.hpp"

namespace excursion {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_manifold(const Manifold& expected, const Manifold& actual_of_point_owner) {
    if (!(expected == actual_of_point_owner)) {
        throw ValidationError("model manifold " + expected.describe() + " does not match " +
                              actual_of_point_owner.describe());
    }
}

// Inner product of the unit-normalised sphere embeddings, clamped to [-1, 1].
double unit_sphere_cosine(const Manifold& m, const ChartPoint& p, const ChartPoint& q) {
    const Eigen::VectorXd a = embed(m, p);
    const Eigen::VectorXd b = embed(m, q);
    const double r2 = m.radius() * m.radius();
    return std::clamp(a.dot(b) / r2, -1.0, 1.0);
}

double schoenberg_sum(const std::vector<double>& b, double t) {
    // Horner in t.
    double acc = 0.0;
    for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * t + *it;
    return acc;
}

}  // namespace

SmoothIsotropicModel::SmoothIsotropicModel(Manifold manifold, SmoothFamily family)
    : manifold_(std::move(manifold)), family_(std::move(family)) {
    std::visit(overloaded{
                   [&](const SquaredExponential& se) {
                       if (!(se.length_scale > 0.0) || !std::isfinite(se.length_scale)) {
                           throw ValidationError("length scale must be finite and > 0",
                                                 "model.length_scale");
                       }
                       rho_prime_0_ = -0.5 / (se.length_scale * se.length_scale);
                   },
                   [&](const SphereSchoenberg& s) {
                       if (manifold_.kind() != ManifoldKind::kSphere) {
                           throw ValidationError("sphere_schoenberg requires a sphere manifold",
                                                 "model.family");
                       }
                       if (s.coefficients.empty()) {
                           throw ValidationError("coefficient vector is empty", "model.b");
                       }
                       for (double b : s.coefficients) {
                           if (!(b >= 0.0) || !std::isfinite(b)) {
                               throw ValidationError("coefficients must be finite and >= 0", "model.b");
                           }
                       }
                       const double total =
                           std::accumulate(s.coefficients.begin(), s.coefficients.end(), 0.0);
                       if (std::abs(total - 1.0) > 1e-12) {
                           throw ValidationError("coefficients must sum to 1 (unit variance), got " +
                                                     std::to_string(total),
                                                 "model.b");
                       }
                       double weighted = 0.0;
                       for (std::size_t n = 1; n < s.coefficients.size(); ++n) {
                           weighted += static_cast<double>(n) * s.coefficients[n];
                       }
                       const double r2 = manifold_.radius() * manifold_.radius();
                       rho_prime_0_ = -0.5 * weighted / r2;
                   },
               },
               family_);
    if (!(rho_prime_0_ < 0.0)) {
        throw ValidationError("degenerate model: rho'(0) must be < 0", "model");
    }
}

double SmoothIsotropicModel::rho(double squared_distance) const {
    return std::visit(overloaded{
                          [&](const SquaredExponential& se) {
                              return std::exp(-squared_distance /
                                              (2.0 * se.length_scale * se.length_scale));
                          },
                          [&](const SphereSchoenberg& s) {
                              const double t = std::cos(std::sqrt(squared_distance) / manifold_.radius());
                              return schoenberg_sum(s.coefficients, t);
                          },
                      },
                      family_);
}

double SmoothIsotropicModel::covariance(const ChartPoint& p, const ChartPoint& q) const {
    return std::visit(overloaded{
                          [&](const SquaredExponential&) {
                              const double d = geodesic_distance(manifold_, p, q);
                              return rho(d * d);
                          },
                          [&](const SphereSchoenberg& s) {
                              return schoenberg_sum(s.coefficients, unit_sphere_cosine(manifold_, p, q));
                          },
                      },
                      family_);
}

double SmoothIsotropicModel::field_covariance(const ChartPoint& p, const ChartPoint& q) const {
    if (const auto* se = std::get_if<SquaredExponential>(&family_)) {
        const double d = chordal_distance(manifold_, p, q);
        return std::exp(-d * d / (2.0 * se->length_scale * se->length_scale));
    }
    return covariance(p, q);
}

std::string SmoothIsotropicModel::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const SquaredExponential& se) { os << "squared_exponential(l=" << se.length_scale << ")"; },
                   [&](const SphereSchoenberg& s) {
                       os << "sphere_schoenberg(b=[";
                       for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
                           os << (i ? "," : "") << s.coefficients[i];
                       }
                       os << "])";
                   },
               },
               family_);
    os << " on " << manifold_.describe();
    return os.str();
}

LocallyIsotropicModel::LocallyIsotropicModel(Manifold manifold, double c, double alpha, LocalFamily family)
    : manifold_(std::move(manifold)), c_(c), alpha_(alpha), family_(std::move(family)) {
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw ValidationError("c must be finite and > 0", "model.c");
    if (!(alpha_ > 0.0 && alpha_ <= 2.0)) throw ValidationError("alpha must lie in (0, 2]", "model.alpha");
    std::visit(overloaded{
                   [](const std::monostate&) {},
                   [&](const PoweredExponential&) {
                       if (manifold_.kind() == ManifoldKind::kSphere && alpha_ > 1.0) {
                           throw ValidationError(
                               "powered_exponential on a sphere is only accepted for alpha <= 1",
                               "model.alpha");
                       }
                   },
                   [&](const StableOnChart&) {
                       if (manifold_.kind() == ManifoldKind::kSphere) {
                           throw ValidationError("stable_on_chart requires a flat manifold", "model.family");
                       }
                   },
                   [&](const SmoothIsotropicModel& smooth) {
                       require_manifold(manifold_, smooth.manifold());
                       const double expected_c = -smooth.rho_prime_0();
                       if (alpha_ != 2.0 || std::abs(c_ - expected_c) > 1e-12 * expected_c) {
                           throw ValidationError("smooth family requires alpha = 2 and c = -rho'(0)", "model");
                       }
                   },
               },
               family_);
}

LocallyIsotropicModel LocallyIsotropicModel::from_smooth(const SmoothIsotropicModel& model) {
    return LocallyIsotropicModel(model.manifold(), -model.rho_prime_0(), 2.0, model);
}

double LocallyIsotropicModel::covariance(const ChartPoint& p, const ChartPoint& q) const {
    return std::visit(overloaded{
                          [](const std::monostate&) -> double {
                              throw ValidationError("no covariance family attached to the local model",
                                                    "model.family");
                          },
                          [&](const PoweredExponential&) {
                              return std::exp(-c_ * std::pow(geodesic_distance(manifold_, p, q), alpha_));
                          },
                          [&](const StableOnChart&) {
                              check_chart_point(manifold_, p);
                              check_chart_point(manifold_, q);
                              return std::exp(-c_ * std::pow((p.coords - q.coords).norm(), alpha_));
                          },
                          [&](const SmoothIsotropicModel& smooth) { return smooth.covariance(p, q); },
                      },
                      family_);
}

double LocallyIsotropicModel::field_covariance(const ChartPoint& p, const ChartPoint& q) const {
    if (std::holds_alternative<PoweredExponential>(family_) &&
        manifold_.kind() == ManifoldKind::kFlatTorus) {
        return std::exp(-c_ * std::pow(chordal_distance(manifold_, p, q), alpha_));
    }
    if (const auto* smooth = std::get_if<SmoothIsotropicModel>(&family_)) {
        return smooth->field_covariance(p, q);
    }
    return covariance(p, q);
}

std::string LocallyIsotropicModel::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const std::monostate&) { os << "local"; },
                   [&](const PoweredExponential&) { os << "powered_exponential"; },
                   [&](const StableOnChart&) { os << "stable_on_chart"; },
                   [&](const SmoothIsotropicModel& s) { os << "local[" << s.describe() << "]"; },
               },
               family_);
    os << "(c=" << c_ << ",alpha=" << alpha_ << ")";
    if (!std::holds_alternative<SmoothIsotropicModel>(family_)) os << " on " << manifold_.describe();
    return os.str();
}

std::pair<double, double> local_expansion(const LocallyIsotropicModel& model) {
    return {model.c(), model.alpha()};
}

std::pair<double, double> local_expansion(const SmoothIsotropicModel& model) {
    return {-model.rho_prime_0(), 2.0};
}

std::vector<double> expansion_ratio_check(const LocallyIsotropicModel& model, const ChartPoint& p,
                                          const std::vector<ChartPoint>& q_sequence) {
    if (!model.has_family()) {
        throw ValidationError("expansion check needs an attached covariance family", "model.family");
    }
    std::vector<double> ratios;
    ratios.reserve(q_sequence.size());
    for (const auto& q : q_sequence) {
        const double d = geodesic_distance(model.manifold(), p, q);
        if (d == 0.0) {
            ratios.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double one_minus = 1.0 - model.covariance(p, q);
        ratios.push_back(one_minus / (model.c() * std::pow(d, model.alpha())));
    }
    return ratios;
}

}  // namespace excursion
