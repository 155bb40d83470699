// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "excursion/approximations.hpp"
#include "excursion/error.hpp"
#include "excursion/pickands.hpp"
#include "excursion/scalar_kernels.hpp"
#include "support.hpp"

using namespace excursion;
using excursion::testing::Gen;
using excursion::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

double psi_oracle(double u) { return 0.5 * boost::math::erfc(u / std::numbers::sqrt2); }

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("EEC on the unit torus") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const SmoothIsotropicModel se(torus, SquaredExponential{1.0});
    const ApproxResult r = eec_approx(se, Domain(torus, FullTorus{}), 3.0);
    const double expected = std::pow(2 * kPi, -1.5) * 3.0 * std::exp(-4.5);
    CHECK(r.method == ApproxMethod::kEec);
    CHECK(r.terms.size() == 3);
    CHECK(r.terms[0] == 0.0);
    CHECK(r.terms[1] == 0.0);
    CHECK(rel_err(r.total, expected) < 1e-14);
    CHECK(rel_err(r.total, 0.0021173) < 1e-3);
    CHECK(std::find(r.notes.begin(), r.notes.end(), "boundaryless validation case") != r.notes.end());
    CHECK(std::find(r.notes.begin(), r.notes.end(), "error term super-exponentially small, unquantified") != r.notes.end());
    // kappa scales the top term: l = 0.5 gives kappa = 4.
    const SmoothIsotropicModel narrow(torus, SquaredExponential{0.5});
    CHECK(rel_err(eec_approx(narrow, Domain(torus, FullTorus{}), 3.0).total, 4 * expected) < 1e-14);
}

TEST_CASE("EEC on the sphere with a Schoenberg covariance") {
    const Manifold s2 = Manifold::sphere(2, 1.0);
    const SmoothIsotropicModel model(s2, SphereSchoenberg{{0.0, 1.0}});
    for (double u : {0.5, 1.0, 2.0, 3.0, 4.5}) {
        const double expected = 2 * psi_oracle(u) + 4 * kPi * std::pow(2 * kPi, -1.5) * u * std::exp(-u * u / 2);
        CHECK(rel_err(eec_approx(model, Domain(s2, FullSphere{1.0}), u).total, expected) < 1e-13);
    }
}

TEST_CASE("EEC top term dominates as u grows") {
    const Manifold r2 = Manifold::euclidean(2);
    const SmoothIsotropicModel se(r2, SquaredExponential{0.4});
    const Domain d(r2, Rectangle{{1.0, 2.0}});
    double prev = std::numeric_limits<double>::infinity();
    for (double u : {5.0, 10.0, 20.0, 30.0}) {
        const ApproxResult r = eec_approx(se, d, u);
        const double gap = std::abs(r.total / *std::max_element(r.terms.begin(), r.terms.end()) - 1.0);
        CHECK(gap < prev);
        prev = gap;
    }
    // The ratio approaches 1 like 1/u.
    CHECK(prev < 0.06);
    const auto notes = eec_approx(se, d, 3.0).notes;
    CHECK(std::find(notes.begin(), notes.end(), "boundary untreated") == notes.end());
}

TEST_CASE("EEC result invariants") {
    Gen g(53);
    const Manifold r3 = Manifold::euclidean(3);
    const Manifold s2 = Manifold::sphere(2, 1.3);
    const Manifold torus = Manifold::flat_torus({1.0, 2.0});
    for (int i = 0; i < 100; ++i) {
        std::vector<std::pair<SmoothIsotropicModel, Domain>> cases;
        const double l = g.uniform(0.1, 2.0);
        cases.emplace_back(SmoothIsotropicModel(r3, SquaredExponential{l}),
                           Domain(r3, Rectangle{{g.uniform(0.1, 3), g.uniform(0.1, 3), g.uniform(0.1, 3)}}));
        cases.emplace_back(SmoothIsotropicModel(r3, SquaredExponential{l}), Domain(r3, Ball{g.uniform(0.1, 3)}));
        const double b1 = g.uniform(0, 1);
        cases.emplace_back(SmoothIsotropicModel(s2, SphereSchoenberg{{0.0, b1, 1.0 - b1}}), Domain(s2, FullSphere{1.3}));
        cases.emplace_back(SmoothIsotropicModel(torus, SquaredExponential{l}), Domain(torus, FullTorus{}));
        for (const auto& [model, domain] : cases) {
            const double u = g.uniform(-2.0, 8.0);
            const ApproxResult r = eec_approx(model, domain, u);
            CHECK(std::abs(r.total - sum(r.terms)) <= 1e-12 * std::max(1.0, std::abs(r.total)));
            CHECK(r.terms.size() == static_cast<std::size_t>(domain.dim() + 1));
            if (u >= std::sqrt(2.0 * domain.dim())) {
                for (double t : r.terms) CHECK(t >= 0.0);
            }
        }
    }
}

TEST_CASE("EEC is strictly decreasing above sqrt(2 dim)") {
    const Manifold r3 = Manifold::euclidean(3);
    const SmoothIsotropicModel se(r3, SquaredExponential{0.5});
    const Manifold s2 = Manifold::sphere(2, 1.0);
    const SmoothIsotropicModel sch(s2, SphereSchoenberg{{0.1, 0.4, 0.5}});
    const std::vector<std::pair<const SmoothIsotropicModel*, Domain>> cases{
        {&se, Domain(r3, Rectangle{{1.0, 2.0, 0.5}})}, {&se, Domain(r3, Ball{1.0})}, {&sch, Domain(s2, FullSphere{1.0})}};
    for (const auto& [model, d] : cases) {
        double prev = std::numeric_limits<double>::infinity();
        for (double u = std::sqrt(2.0 * d.dim()); u <= 12.0; u += 0.05) {
            const double v = eec_approx(*model, d, u).total;
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("EEC validation") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const SmoothIsotropicModel se(torus, SquaredExponential{1.0});
    CHECK_THROWS_AS(eec_approx(se, Domain(Manifold::flat_torus({1.0, 2.0}), FullTorus{}), 3.0), ValidationError);
    CHECK_THROWS_AS(eec_approx(se, Domain(torus, FullTorus{}), std::nan("")), ValidationError);
}

TEST_CASE("Pickands approximation examples") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const LocallyIsotropicModel smooth_like(torus, 0.5, 2.0);
    const PickandsConstant h{1.0 / kPi, ConstantProvenance::kExact, 0.0};
    const ApproxResult r = pickands_approx(smooth_like, Domain(torus, FullTorus{}), 3.0, h);
    // u^{2N/alpha} = u^2 for N = alpha = 2.
    const double expected = 0.5 / kPi * 9.0 * psi_oracle(3.0);
    CHECK(rel_err(r.total, expected) < 1e-14);
    CHECK(r.terms.size() == 1);
    CHECK(r.terms[0] == r.total);
    CHECK(r.pickands_constant.provenance == ConstantProvenance::kExact);

    // Linear in volume, c^{N/alpha} in c.
    const Manifold r2 = Manifold::euclidean(2);
    const LocallyIsotropicModel pe(r2, 1.0, 1.0, PoweredExponential{});
    const LocallyIsotropicModel pe2(r2, 2.0, 1.0, PoweredExponential{});
    const PickandsConstant h12{0.4, ConstantProvenance::kUser, 0.0};
    const double base = pickands_approx(pe, Domain(r2, Rectangle{{1.0, 1.0}}), 3.0, h12).total;
    CHECK(rel_err(pickands_approx(pe, Domain(r2, Rectangle{{2.0, 1.0}}), 3.0, h12).total, 2 * base) < 1e-14);
    CHECK(rel_err(pickands_approx(pe2, Domain(r2, Rectangle{{1.0, 1.0}}), 3.0, h12).total, 4 * base) < 1e-14);
    CHECK(std::find(r.notes.begin(), r.notes.end(), "boundary untreated") == r.notes.end());
    const auto rect_notes = pickands_approx(pe, Domain(r2, Rectangle{{1.0, 1.0}}), 3.0, h12).notes;
    CHECK(std::find(rect_notes.begin(), rect_notes.end(), "boundary untreated") != rect_notes.end());
}

TEST_CASE("Pickands approximation validation") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const LocallyIsotropicModel pe(torus, 1.0, 1.0, PoweredExponential{});
    const Domain d(torus, FullTorus{});
    const PickandsConstant h{0.5, ConstantProvenance::kUser, 0.0};
    CHECK_THROWS_AS(pickands_approx(pe, d, 0.0, h), ValidationError);
    CHECK_THROWS_AS(pickands_approx(pe, d, -1.0, h), ValidationError);
    CHECK_THROWS_AS(pickands_approx(pe, d, 3.0, PickandsConstant{0.0, ConstantProvenance::kUser, 0.0}), ValidationError);
    const Manifold s2 = Manifold::sphere(2, 1.0);
    const LocallyIsotropicModel on_sphere(s2, 0.5, 2.0);
    CHECK_THROWS_AS(pickands_approx(on_sphere, Domain(s2, GreatCircle{1.0}), 3.0, h), ValidationError);
}

TEST_CASE("Pickands approximation on a submanifold") {
    const Manifold s2 = Manifold::sphere(2, 1.0);
    const LocallyIsotropicModel model(s2, 0.5, 2.0);
    const PickandsConstant h{1.0 / std::sqrt(kPi), ConstantProvenance::kExact, 0.0};
    // u^{2k/alpha} = u for k = 1, alpha = 2.
    const double expected = 2 * kPi * std::sqrt(0.5) / std::sqrt(kPi) * 3.0 * psi_oracle(3.0);
    CHECK(rel_err(pickands_approx_submanifold(model, Domain(s2, GreatCircle{1.0}), 3.0, h).total, expected) < 1e-14);

    const Manifold s2r = Manifold::sphere(2, 2.0);
    const LocallyIsotropicModel model_r(s2r, 0.5, 2.0);
    CHECK(rel_err(pickands_approx_submanifold(model_r, Domain(s2r, GreatCircle{2.0}), 3.0, h).total, 2 * expected) <
          1e-14);

    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const LocallyIsotropicModel pe(torus, 1.3, 1.2, PoweredExponential{});
    const PickandsConstant h2{0.7, ConstantProvenance::kUser, 0.0};
    for (double u : {1.0, 2.5, 4.0}) {
        CHECK(pickands_approx_submanifold(pe, Domain(torus, FullTorus{}), u, h2).total ==
              pickands_approx(pe, Domain(torus, FullTorus{}), u, h2).total);
    }
}

TEST_CASE("Pickands leading term equals the top EEC term") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    for (double l : {0.3, 1.0}) {
        const SmoothIsotropicModel se(torus, SquaredExponential{l});
        const LocallyIsotropicModel local = LocallyIsotropicModel::from_smooth(se);
        const Domain d(torus, FullTorus{});
        const PickandsConstant h = exact_pickands_constant_alpha2(2);
        double prev = std::numeric_limits<double>::infinity();
        for (double u : {10.0, 15.0, 20.0, 30.0}) {
            const double ratio = pickands_approx(local, d, u, h).total / eec_approx(se, d, u).terms.back();
            const double gap = std::abs(ratio - 1.0);
            if (u == 10.0) CHECK(gap <= 0.03);
            CHECK(gap < prev);
            prev = gap;
        }
    }
    CHECK(exact_pickands_constant_alpha2(1).value == doctest::Approx(1 / std::sqrt(kPi)).epsilon(1e-15));
    CHECK(exact_pickands_constant_alpha2(3).value == doctest::Approx(std::pow(kPi, -1.5)).epsilon(1e-15));
}

TEST_CASE("Pickands approximation is additive over disjoint domains") {
    const Manifold torus = Manifold::flat_torus({1.0, 1.0});
    const LocallyIsotropicModel pe(torus, 1.0, 1.0, PoweredExponential{});
    const PickandsConstant h{0.43, ConstantProvenance::kUser, 0.0};
    Gen g(59);
    for (int i = 0; i < 50; ++i) {
        const double u = g.uniform(0.5, 6.0);
        const double split = g.uniform(0.05, 0.95);
        const double whole = pickands_approx(pe, Domain(torus, FullTorus{}), u, h).total;
        const double a = pickands_approx(pe, Domain(torus, Rectangle{{split, 1.0}}), u, h).total;
        const double b = pickands_approx(pe, Domain(torus, Rectangle{{1.0 - split, 1.0}}), u, h).total;
        CHECK(std::abs(whole - (a + b)) <= 1e-12 * whole);
        const double quarter = pickands_approx(pe, Domain(torus, Rectangle{{0.5, 0.5}}), u, h).total;
        CHECK(std::abs(whole - 4 * quarter) <= 1e-12 * whole);
    }
}

TEST_CASE("determinant integral") {
    const Manifold r2 = Manifold::euclidean(2);
    const LocallyIsotropicModel flat(r2, 1.0, 1.0);
    const ChartBox box{Eigen::Vector2d(0.5, -1.0), Eigen::Vector2d(2.0, 3.0)};
    CHECK(euclidean_det_integral(pickands_matrix_field(flat), box, {64, 64}) == doctest::Approx(6.0).epsilon(1e-14));

    const Manifold s2 = Manifold::sphere(2, 1.0);
    const LocallyIsotropicModel sphere_model(s2, 1.0, 2.0);
    const ChartBox band{Eigen::Vector2d(kPi / 3, 0.0), Eigen::Vector2d(2 * kPi / 3, 2 * kPi)};
    const double v = euclidean_det_integral(pickands_matrix_field(sphere_model), band, {1024, 1024});
    CHECK(std::abs(v - 2 * kPi) <= 1e-6);
    // At the default 512 cells the error is the midpoint-rule leading term
    // -(h^2 / 24) int f'' with f = sin over the band, h = (pi/3) / 512.
    const int n = kDefaultDetIntegralPoints;
    const double coarse = euclidean_det_integral(pickands_matrix_field(sphere_model), band, {n, n});
    const double h = (kPi / 3) / n;
    const double predicted = h * h / 24.0 * 2 * kPi * (std::cos(kPi / 3) - std::cos(2 * kPi / 3));
    CHECK(rel_err(coarse - 2 * kPi, predicted) < 1e-3);

    // Homogeneity in c: factor lambda^{N/alpha}.
    for (double alpha : {1.0, 1.5, 2.0}) {
        const LocallyIsotropicModel m1(s2, 0.7, alpha);
        const LocallyIsotropicModel m2(s2, 0.7 * 3.0, alpha);
        const double a = euclidean_det_integral(pickands_matrix_field(m1), band, {64, 64});
        const double b = euclidean_det_integral(pickands_matrix_field(m2), band, {64, 64});
        CHECK(rel_err(b, std::pow(3.0, 2.0 / alpha) * a) < 1e-12);
    }

    // Thread count does not change the result.
    CHECK(euclidean_det_integral(pickands_matrix_field(sphere_model), band, {128, 128}, 1) ==
          euclidean_det_integral(pickands_matrix_field(sphere_model), band, {128, 128}, 4));

    CHECK_THROWS_AS(euclidean_det_integral(pickands_matrix_field(sphere_model),
                                           ChartBox{Eigen::Vector2d(-0.5, 0.0), Eigen::Vector2d(0.5, 1.0)}, {8, 8}),
                    DegenerateChartError);
}

TEST_CASE("determinant integral equals band area on random sphere bands") {
    Gen g(61);
    const Manifold s2 = Manifold::sphere(2, 1.0);
    const LocallyIsotropicModel model(s2, 1.0, 2.0);
    for (int i = 0; i < 5; ++i) {
        double a = g.uniform(0.05, kPi - 0.05);
        double b = g.uniform(0.05, kPi - 0.05);
        if (a > b) std::swap(a, b);
        const ChartBox band{Eigen::Vector2d(a, 0.0), Eigen::Vector2d(b, 2 * kPi)};
        // The integrand does not depend on theta_2; refine along theta_1 only.
        const double v = euclidean_det_integral(pickands_matrix_field(model), band, {4096, 8});
        CHECK(std::abs(v - 2 * kPi * (std::cos(a) - std::cos(b))) <= 1e-6);
    }
}

TEST_CASE("Pickands constant resolution") {
    const PickandsConstant exact = resolve_pickands_constant(2.0, 2);
    CHECK(exact.provenance == ConstantProvenance::kExact);
    CHECK(exact.value == doctest::Approx(1 / kPi).epsilon(1e-15));
    const PickandsConstant user = resolve_pickands_constant(1.0, 2, 0.37);
    CHECK(user.provenance == ConstantProvenance::kUser);
    CHECK(user.value == 0.37);
    CHECK_THROWS_AS(resolve_pickands_constant(1.0, 2, -1.0), ValidationError);
    PickandsOptions o = default_pickands_options(1.0, 1);
    o.reps = 2000;
    o.seed = 3;
    const PickandsConstant mc = resolve_pickands_constant(1.0, 1, std::nullopt, o);
    CHECK(mc.provenance == ConstantProvenance::kMonteCarlo);
    CHECK(mc.value > 0.0);
    CHECK(mc.standard_error > 0.0);
    CHECK(to_string(ConstantProvenance::kMonteCarlo) == "mc");
    CHECK(to_string(ApproxMethod::kPickands) == "pickands");
}
