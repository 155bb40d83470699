// SPDX-License-Identifier: Apache-2.0
//
// Brute-force oracle: exact joint Gaussian samples of the field on a grid over
// a catalogue domain, empirical excursion probabilities with Wilson intervals,
// and comparison tables against the analytic approximations.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "excursion/approximations.hpp"
#include "excursion/covariance.hpp"
#include "excursion/gaussian_sampler.hpp"
#include "excursion/lk_curvatures.hpp"

namespace excursion {

/// Largest grid accepted by build_grid (factorization budget).
inline constexpr std::size_t kMaxGridPoints = 10000;

/// Grid points on a domain. The first `coarse_count` points form the grid at
/// `coarse_resolution` (even tensor indices), so coarse maxima are taken over
/// a subset of the same sample. coarse_count = 0 when no nested grid exists.
struct Grid {
    std::vector<ChartPoint> points;
    std::size_t coarse_count = 0;
    int resolution = 0;
    int coarse_resolution = 0;
};

/// Tensor grid for rectangles and tori, latitude-weighted rings on S^2,
/// equally spaced points on a great circle, a masked tensor grid on balls.
/// Throws ValidationError for resolution < 2 or more than kMaxGridPoints points.
Grid build_grid(const Domain& d, int resolution);

using CovarianceKernel = std::function<double(const ChartPoint&, const ChartPoint&)>;

/// The covariance used for simulation (field_covariance of the model).
CovarianceKernel field_kernel(const SmoothIsotropicModel& model);
/// Requires an attached covariance family.
CovarianceKernel field_kernel(const LocallyIsotropicModel& model);

/// Per-replication maxima over each index set of `regions`.
/// result[r][i] is the max of replication i over region r.
std::vector<std::vector<double>> sample_region_maxima(const CovarianceKernel& kernel, const Grid& grid,
                                                      const std::vector<std::vector<std::size_t>>& regions,
                                                      std::size_t reps, std::uint64_t seed, unsigned threads = 0,
                                                      JitterPolicy jitter = {});

/// M_i = max over the whole grid of replication i.
std::vector<double> sample_field(const CovarianceKernel& kernel, const Grid& grid, std::size_t reps,
                                 std::uint64_t seed, unsigned threads = 0, JitterPolicy jitter = {});

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

struct McEstimate {
    double u = 0.0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::size_t reps = 0;
    std::size_t grid_size = 0;
    std::uint64_t seed = 0;
    int resolution = 0;
    /// p_hat on the nested coarse grid, same replications.
    std::optional<double> p_hat_coarse;
};

/// p_hat(u) = #{i : M_i >= u} / reps for each u, from one shared sample set.
std::vector<McEstimate> excursion_estimates(const std::vector<double>& maxima,
                                            const std::vector<double>& coarse_maxima,
                                            const std::vector<double>& u_grid, const Grid& grid,
                                            std::uint64_t seed);

std::vector<McEstimate> empirical_excursion(const SmoothIsotropicModel& model, const Domain& d,
                                            const std::vector<double>& u_grid, int resolution, std::size_t reps,
                                            std::uint64_t seed, unsigned threads = 0);
std::vector<McEstimate> empirical_excursion(const LocallyIsotropicModel& model, const Domain& d,
                                            const std::vector<double>& u_grid, int resolution, std::size_t reps,
                                            std::uint64_t seed, unsigned threads = 0);

struct ComparisonRow {
    double u = 0.0;
    double analytic_total = 0.0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::optional<double> ratio;  // analytic / p_hat, empty when p_hat = 0
    bool within_ci = false;
    int resolution = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::optional<double> p_hat_coarse;
};

/// Joins analytic and empirical results; throws ValidationError when the u grids differ.
std::vector<ComparisonRow> compare_report(const std::vector<ApproxResult>& analytic,
                                          const std::vector<McEstimate>& empirical);

}  // namespace excursion
