// SPDX-License-Identifier: Apache-2.0
#include "excursion/approximations.hpp"

#include <cmath>
#include <numbers>

#include "excursion/error.hpp"
#include "excursion/gaussian_sampler.hpp"
#include "excursion/scalar_kernels.hpp"

namespace excursion {
namespace {

constexpr const char* kSuperExponentialNote = "error term super-exponentially small, unquantified";
constexpr const char* kBoundaryNote = "boundary untreated";
constexpr const char* kBoundarylessNote = "boundaryless validation case";

void require_same_manifold(const Manifold& model, const Manifold& domain) {
    if (!(model == domain)) {
        throw ValidationError("domain manifold " + domain.describe() + " does not match model manifold " +
                                  model.describe(),
                              "domain");
    }
}

ApproxResult pickands_impl(const LocallyIsotropicModel& model, const Domain& d, double u,
                           const PickandsConstant& h) {
    require_same_manifold(model.manifold(), d.manifold());
    if (!(u > 0.0)) throw ValidationError("Pickands approximation requires u > 0", "u");
    if (!(h.value > 0.0) || !std::isfinite(h.value)) {
        throw ValidationError("Pickands constant must be finite and > 0", "pickands.H");
    }
    const int k = d.dim();
    const double volume = lk_curvatures(d).volume();
    const double exponent = k / model.alpha();
    const double total = volume * std::pow(model.c(), exponent) * h.value * std::pow(u, 2.0 * exponent) *
                         gaussian_tail(u);

    ApproxResult r;
    r.u = u;
    r.total = total;
    r.terms = {total};
    r.method = ApproxMethod::kPickands;
    r.model = model.describe();
    r.domain = d.describe();
    r.pickands_constant = h;
    if (d.has_boundary()) r.notes.emplace_back(kBoundaryNote);
    return r;
}

}  // namespace

std::string to_string(ApproxMethod m) { return m == ApproxMethod::kEec ? "eec" : "pickands"; }

std::string to_string(ConstantProvenance p) {
    switch (p) {
        case ConstantProvenance::kNone:
            return "none";
        case ConstantProvenance::kExact:
            return "exact";
        case ConstantProvenance::kMonteCarlo:
            return "mc";
        case ConstantProvenance::kUser:
            return "user";
    }
    return "none";
}

ApproxResult eec_approx(const SmoothIsotropicModel& model, const Domain& d, double u) {
    require_same_manifold(model.manifold(), d.manifold());
    if (!std::isfinite(u)) throw ValidationError("u must be finite", "u");
    const double kappa = -2.0 * model.rho_prime_0();
    const LkVector lk = rescale_lk(lk_curvatures(d), kappa);

    ApproxResult r;
    r.u = u;
    r.method = ApproxMethod::kEec;
    r.model = model.describe();
    r.domain = d.describe();
    r.terms.resize(lk.values.size());
    for (std::size_t j = 0; j < lk.values.size(); ++j) {
        r.terms[j] = lk.values[j] * beta_kernel(static_cast<int>(j), u);
    }
    r.total = 0.0;
    for (double t : r.terms) r.total += t;
    r.notes.emplace_back(kSuperExponentialNote);
    if (std::holds_alternative<FullTorus>(d.shape())) r.notes.emplace_back(kBoundarylessNote);
    return r;
}

ApproxResult pickands_approx(const LocallyIsotropicModel& model, const Domain& d, double u,
                             const PickandsConstant& h) {
    if (d.dim() != d.manifold().dim()) {
        throw ValidationError("domain is lower-dimensional; use the submanifold form", "domain");
    }
    return pickands_impl(model, d, u, h);
}

ApproxResult pickands_approx_submanifold(const LocallyIsotropicModel& model, const Domain& d, double u,
                                         const PickandsConstant& h) {
    return pickands_impl(model, d, u, h);
}

PickandsConstant exact_pickands_constant_alpha2(int dim) {
    if (dim < 1) throw ValidationError("dimension must be >= 1");
    return {std::pow(std::numbers::pi, -0.5 * dim), ConstantProvenance::kExact, 0.0};
}

double euclidean_det_integral(const MatrixField& b, const ChartBox& region, const std::vector<int>& points_per_axis,
                              unsigned threads) {
    const Eigen::Index n = region.lower.size();
    if (n == 0 || region.upper.size() != n || static_cast<Eigen::Index>(points_per_axis.size()) != n) {
        throw ValidationError("region and grid dimensions disagree");
    }
    std::size_t cells = 1;
    Eigen::VectorXd step(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (points_per_axis[i] < 1) throw ValidationError("quadrature needs >= 1 point per axis");
        if (!(region.upper[i] > region.lower[i])) throw ValidationError("empty quadrature region");
        step[i] = (region.upper[i] - region.lower[i]) / points_per_axis[i];
        cells *= static_cast<std::size_t>(points_per_axis[i]);
    }
    const double cell_volume = step.prod();

    std::vector<double> values(cells);
    const std::size_t block = 4096;
    const std::size_t blocks = (cells + block - 1) / block;
    parallel_for_blocks(blocks, threads, [&](std::size_t blk) {
        Eigen::VectorXd t(n);
        const std::size_t end = std::min(cells, (blk + 1) * block);
        for (std::size_t idx = blk * block; idx < end; ++idx) {
            std::size_t rem = idx;
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::size_t k = rem % static_cast<std::size_t>(points_per_axis[i]);
                rem /= static_cast<std::size_t>(points_per_axis[i]);
                t[i] = region.lower[i] + (static_cast<double>(k) + 0.5) * step[i];
            }
            const Eigen::MatrixXd m = b(t);
            if (m.rows() != n || m.cols() != n) throw ValidationError("matrix field has wrong shape");
            const double det = std::abs(m.determinant());
            if (!(det > 0.0)) throw DegenerateChartError("degenerate metric on the quadrature region");
            values[idx] = det;
        }
    });
    return pairwise_sum(values.data(), values.size()) * cell_volume;
}

MatrixField pickands_matrix_field(const LocallyIsotropicModel& model, int chart) {
    const double scale = std::pow(model.c(), 1.0 / model.alpha());
    Manifold m = model.manifold();
    return [m, scale, chart](const Eigen::VectorXd& t) {
        return Eigen::MatrixXd(scale * metric_sqrt(m, ChartPoint(t, chart)));
    };
}

}  // namespace excursion
