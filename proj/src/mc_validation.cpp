// SPDX-License-Identifier: Apache-2.0
#include "excursion/mc_validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "excursion/error.hpp"

namespace excursion {
namespace {

constexpr double kWilsonZ = 1.959963984540054;

struct Axis {
    std::vector<double> values;
    bool nests = false;  // even indices form the grid at coarse resolution
};

Axis periodic_axis(double period, int resolution) {
    Axis a;
    for (int k = 0; k < resolution; ++k) a.values.push_back(period * k / resolution);
    a.nests = resolution % 2 == 0;
    return a;
}

Axis closed_axis(double lower, double upper, int resolution) {
    Axis a;
    for (int k = 0; k < resolution; ++k) a.values.push_back(lower + (upper - lower) * k / (resolution - 1));
    a.values.back() = upper;
    a.nests = resolution % 2 == 1;
    return a;
}

/// Tensor grid over `axes`, all-even index points first. Points failing
/// `keep` are dropped.
Grid tensor_grid(const std::vector<Axis>& axes, int resolution,
                 const std::function<bool(const Eigen::VectorXd&)>& keep) {
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    if (total > 100 * kMaxGridPoints) {
        throw ValidationError("grid would exceed " + std::to_string(kMaxGridPoints) + " points",
                              "mc.resolution");
    }
    const bool nests = std::all_of(axes.begin(), axes.end(), [](const Axis& a) { return a.nests; });

    std::vector<ChartPoint> coarse;
    std::vector<ChartPoint> rest;
    const auto dim = static_cast<Eigen::Index>(axes.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        Eigen::VectorXd x(dim);
        std::size_t rem = idx;
        bool even = true;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const std::size_t n = axes[i].values.size();
            const std::size_t k = rem % n;
            rem /= n;
            x[i] = axes[i].values[k];
            even = even && k % 2 == 0;
        }
        if (!keep(x)) continue;
        (nests && even ? coarse : rest).emplace_back(std::move(x));
    }
    Grid g;
    g.resolution = resolution;
    g.coarse_count = nests ? coarse.size() : 0;
    g.coarse_resolution = nests ? (resolution + 1) / 2 : 0;
    g.points = std::move(coarse);
    g.points.insert(g.points.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    return g;
}

bool keep_all(const Eigen::VectorXd&) { return true; }

Grid sphere_rings(double /*radius*/, int resolution) {
    Grid g;
    g.resolution = resolution;
    const double pi = std::numbers::pi;
    for (int i = 0; i < resolution; ++i) {
        const double theta = (i + 0.5) * pi / resolution;
        const int ring = std::max(3, static_cast<int>(std::ceil(2.0 * resolution * std::sin(theta))));
        for (int j = 0; j < ring; ++j) {
            g.points.emplace_back(ChartPoint{theta, 2.0 * pi * j / ring});
            if (g.points.size() > kMaxGridPoints) {
                throw ValidationError("grid would exceed " + std::to_string(kMaxGridPoints) + " points",
                                      "mc.resolution");
            }
        }
    }
    return g;
}

template <class Model>
std::vector<McEstimate> run_empirical(const Model& model, const Domain& d, const std::vector<double>& u_grid,
                                      int resolution, std::size_t reps, std::uint64_t seed, unsigned threads) {
    if (!(model.manifold() == d.manifold())) {
        throw ValidationError("model manifold " + model.manifold().describe() + " differs from domain manifold " +
                                  d.manifold().describe(),
                              "manifold");
    }
    const CovarianceKernel kernel = field_kernel(model);
    const Grid grid = build_grid(d, resolution);
    std::vector<std::vector<std::size_t>> regions(1);
    regions[0].resize(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) regions[0][i] = i;
    if (grid.coarse_count > 0) regions.emplace_back(regions[0].begin(), regions[0].begin() + grid.coarse_count);
    const auto maxima = sample_region_maxima(kernel, grid, regions, reps, seed, threads);
    return excursion_estimates(maxima[0], grid.coarse_count > 0 ? maxima[1] : std::vector<double>{}, u_grid, grid,
                               seed);
}

}  // namespace

Grid build_grid(const Domain& d, int resolution) {
    if (resolution < 2) throw ValidationError("resolution must be >= 2", "mc.resolution");
    const Manifold& m = d.manifold();
    Grid g = std::visit(
        [&](const auto& s) -> Grid {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, FullTorus>) {
                std::vector<Axis> axes;
                for (double p : m.periods()) axes.push_back(periodic_axis(p, resolution));
                return tensor_grid(axes, resolution, keep_all);
            } else if constexpr (std::is_same_v<S, Rectangle>) {
                std::vector<Axis> axes;
                for (std::size_t i = 0; i < s.sides.size(); ++i) {
                    const bool wraps = m.kind() == ManifoldKind::kFlatTorus &&
                                       std::abs(s.sides[i] - m.periods()[i]) <= 1e-12 * m.periods()[i];
                    axes.push_back(wraps ? periodic_axis(s.sides[i], resolution)
                                         : closed_axis(0.0, s.sides[i], resolution));
                }
                return tensor_grid(axes, resolution, keep_all);
            } else if constexpr (std::is_same_v<S, Ball>) {
                const std::vector<Axis> axes(static_cast<std::size_t>(m.dim()),
                                             closed_axis(-s.radius, s.radius, resolution));
                const double limit = s.radius * (1.0 + 1e-12);
                return tensor_grid(axes, resolution, [&](const Eigen::VectorXd& x) { return x.norm() <= limit; });
            } else if constexpr (std::is_same_v<S, FullSphere>) {
                if (m.dim() != 2) throw ValidationError("sphere grids are supported on S^2 only", "manifold.dim");
                return sphere_rings(s.radius, resolution);
            } else {
                Grid c;
                c.resolution = resolution;
                for (int j = 0; j < resolution; ++j) {
                    c.points.emplace_back(ChartPoint{std::numbers::pi / 2, 2.0 * std::numbers::pi * j / resolution});
                }
                if (resolution % 2 == 0) {
                    std::vector<ChartPoint> ordered;
                    for (int j = 0; j < resolution; j += 2) ordered.push_back(c.points[j]);
                    for (int j = 1; j < resolution; j += 2) ordered.push_back(c.points[j]);
                    c.points = std::move(ordered);
                    c.coarse_count = static_cast<std::size_t>(resolution / 2);
                    c.coarse_resolution = resolution / 2;
                }
                return c;
            }
        },
        d.shape());
    if (g.points.size() > kMaxGridPoints) {
        throw ValidationError("grid has " + std::to_string(g.points.size()) + " points, limit is " +
                                  std::to_string(kMaxGridPoints),
                              "mc.resolution");
    }
    return g;
}

CovarianceKernel field_kernel(const SmoothIsotropicModel& model) {
    return [model](const ChartPoint& p, const ChartPoint& q) { return model.field_covariance(p, q); };
}

CovarianceKernel field_kernel(const LocallyIsotropicModel& model) {
    if (!model.has_family()) {
        throw ValidationError("simulation needs a covariance family, not only (c, alpha)", "model.family");
    }
    return [model](const ChartPoint& p, const ChartPoint& q) { return model.field_covariance(p, q); };
}

std::vector<std::vector<double>> sample_region_maxima(const CovarianceKernel& kernel, const Grid& grid,
                                                      const std::vector<std::vector<std::size_t>>& regions,
                                                      std::size_t reps, std::uint64_t seed, unsigned threads,
                                                      JitterPolicy jitter) {
    const auto n = static_cast<Eigen::Index>(grid.points.size());
    if (n == 0) throw ValidationError("grid is empty", "mc.resolution");
    if (reps == 0) throw ValidationError("reps must be >= 1", "mc.reps");
    for (const auto& r : regions) {
        if (r.empty()) throw ValidationError("region is empty", "mc.regions");
        for (std::size_t i : r) {
            if (i >= grid.points.size()) throw ValidationError("region index out of range", "mc.regions");
        }
    }

    const GaussianSampler sampler(
        covariance_matrix(n, [&](Eigen::Index i, Eigen::Index j) { return kernel(grid.points[i], grid.points[j]); }),
        jitter);

    std::vector<std::vector<double>> result(regions.size(), std::vector<double>(reps));
    const std::size_t blocks = (reps + kReplicationBlock - 1) / kReplicationBlock;
    parallel_for_blocks(blocks, resolve_threads(threads), [&](std::size_t b) {
        const std::size_t first = b * kReplicationBlock;
        const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(kReplicationBlock, reps - first));
        Eigen::MatrixXd x;
        sampler.sample_block(seed, first, count, x);
        for (std::size_t r = 0; r < regions.size(); ++r) {
            for (Eigen::Index c = 0; c < count; ++c) {
                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t i : regions[r]) top = std::max(top, x(static_cast<Eigen::Index>(i), c));
                result[r][first + static_cast<std::size_t>(c)] = top;
            }
        }
    });
    return result;
}

std::vector<double> sample_field(const CovarianceKernel& kernel, const Grid& grid, std::size_t reps,
                                 std::uint64_t seed, unsigned threads, JitterPolicy jitter) {
    std::vector<std::size_t> all(grid.points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return std::move(sample_region_maxima(kernel, grid, {all}, reps, seed, threads, jitter)[0]);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    w.low = std::min(w.low, p);
    w.high = std::max(w.high, p);
    return w;
}

std::vector<McEstimate> excursion_estimates(const std::vector<double>& maxima,
                                            const std::vector<double>& coarse_maxima,
                                            const std::vector<double>& u_grid, const Grid& grid,
                                            std::uint64_t seed) {
    std::vector<McEstimate> out;
    out.reserve(u_grid.size());
    const std::size_t reps = maxima.size();
    for (double u : u_grid) {
        const auto hits = static_cast<std::size_t>(
            std::count_if(maxima.begin(), maxima.end(), [u](double m) { return m >= u; }));
        McEstimate e;
        e.u = u;
        e.reps = reps;
        e.p_hat = reps ? static_cast<double>(hits) / static_cast<double>(reps) : 0.0;
        const WilsonInterval w = wilson_interval(hits, reps);
        e.ci_low = w.low;
        e.ci_high = w.high;
        e.grid_size = grid.points.size();
        e.seed = seed;
        e.resolution = grid.resolution;
        if (!coarse_maxima.empty()) {
            const auto coarse_hits = std::count_if(coarse_maxima.begin(), coarse_maxima.end(),
                                                   [u](double m) { return m >= u; });
            e.p_hat_coarse = static_cast<double>(coarse_hits) / static_cast<double>(coarse_maxima.size());
        }
        out.push_back(e);
    }
    return out;
}

std::vector<McEstimate> empirical_excursion(const SmoothIsotropicModel& model, const Domain& d,
                                            const std::vector<double>& u_grid, int resolution, std::size_t reps,
                                            std::uint64_t seed, unsigned threads) {
    return run_empirical(model, d, u_grid, resolution, reps, seed, threads);
}

std::vector<McEstimate> empirical_excursion(const LocallyIsotropicModel& model, const Domain& d,
                                            const std::vector<double>& u_grid, int resolution, std::size_t reps,
                                            std::uint64_t seed, unsigned threads) {
    return run_empirical(model, d, u_grid, resolution, reps, seed, threads);
}

std::vector<ComparisonRow> compare_report(const std::vector<ApproxResult>& analytic,
                                          const std::vector<McEstimate>& empirical) {
    if (analytic.size() != empirical.size()) {
        throw ValidationError("analytic and empirical u grids differ in length", "u");
    }
    std::vector<ComparisonRow> rows;
    rows.reserve(analytic.size());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const ApproxResult& a = analytic[i];
        const McEstimate& e = empirical[i];
        if (std::abs(a.u - e.u) > 1e-12 * std::max(1.0, std::abs(a.u))) {
            throw ValidationError("u grids differ at position " + std::to_string(i), "u");
        }
        ComparisonRow r;
        r.u = a.u;
        r.analytic_total = a.total;
        r.p_hat = e.p_hat;
        r.ci_low = e.ci_low;
        r.ci_high = e.ci_high;
        if (e.p_hat > 0.0) r.ratio = a.total / e.p_hat;
        r.within_ci = e.ci_low <= a.total && a.total <= e.ci_high;
        r.resolution = e.resolution;
        r.reps = e.reps;
        r.seed = e.seed;
        r.p_hat_coarse = e.p_hat_coarse;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace excursion
