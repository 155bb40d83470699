// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo estimation of Pickands' constant H_{alpha,N} from exact lattice
// samples of the drifted field
//     Z(s) = sqrt(2) W(s) - |s|^alpha,
//     Cov W(s), W(v) = (|s|^alpha + |v|^alpha - |s - v|^alpha) / 2.
//
// Two estimators are available; see docs/pickands_estimator.md.
//   kSupNormalized  mean of max_s e^{Z(s)} / (h^N sum_s e^{Z(s)}) over the
//                   centred cube [-K/2, K/2]^N (default; bounded statistic).
//   kDefiningLimit  K^{-N} mean of (e^{max Z} - 1)^+ over [0, K]^N, the
//                   defining limit after exchanging integral and expectation.
//                   Unbiased for the finite-K quantity but heavy-tailed.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "excursion/approximations.hpp"
#include "excursion/gaussian_sampler.hpp"

namespace excursion {

enum class PickandsEstimator { kSupNormalized, kDefiningLimit };

std::string to_string(PickandsEstimator e);
PickandsEstimator pickands_estimator_from_string(const std::string& name);

struct PickandsOptions {
    double alpha = 2.0;
    int dim = 1;
    double cube_side = 8.0;
    double spacing = 0.05;
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
    PickandsEstimator estimator = PickandsEstimator::kSupNormalized;
    unsigned threads = 0;
    JitterPolicy jitter{};
};

/// Desk-scale defaults: K=8, h=0.05, 10^4 reps for N=1; K=4, h=0.1, 5000 reps
/// for N=2; K=2, h=0.2, 2000 reps for N=3.
PickandsOptions default_pickands_options(double alpha, int dim);

struct PickandsEstimate {
    double alpha = 0.0;
    int dim = 0;
    double cube_side = 0.0;
    double spacing = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
    PickandsEstimator estimator = PickandsEstimator::kSupNormalized;
    std::size_t lattice_size = 0;
    double jitter = 0.0;
};

/// Lattice points with spacing h: [0,K]^N for the defining-limit estimator,
/// [-K/2,K/2]^N for the sup-normalised one. Coordinates are integer multiples
/// of h, so the origin is exactly representable.
std::vector<Eigen::VectorXd> pickands_lattice(int dim, double cube_side, double spacing, PickandsEstimator estimator);

/// Exact joint sampler for Z on a fixed lattice. Points at the origin are
/// pinned to Z = 0 and excluded from the factorization.
class DriftedFieldSampler {
public:
    DriftedFieldSampler(double alpha, std::vector<Eigen::VectorXd> lattice, JitterPolicy jitter = {});

    [[nodiscard]] std::size_t size() const noexcept { return lattice_.size(); }
    [[nodiscard]] double jitter() const noexcept { return sampler_ ? sampler_->jitter() : 0.0; }

    /// Z at every lattice point (rows) for replications first..first+count-1.
    void sample_block(std::uint64_t seed, std::uint64_t first, Eigen::Index count, Eigen::MatrixXd& out) const;

private:
    double alpha_;
    std::vector<Eigen::VectorXd> lattice_;
    std::vector<Eigen::Index> free_index_;  // -1 for pinned points
    Eigen::VectorXd drift_;                 // |s|^alpha per free point
    std::optional<GaussianSampler> sampler_;
};

/// One exact joint sample of Z at `lattice` (replication 0 of `seed`).
Eigen::VectorXd simulate_z(double alpha, const std::vector<Eigen::VectorXd>& lattice, std::uint64_t seed);

/// Throws ValidationError for K < 1, h > 0.25, reps < 1000 or alpha outside (0, 2].
PickandsEstimate estimate_pickands(const PickandsOptions& options);

/// H_{alpha,dim}: `user` if given, exact pi^{-dim/2} for alpha = 2, otherwise a
/// Monte Carlo estimate with `options` (defaults when not supplied).
PickandsConstant resolve_pickands_constant(double alpha, int dim, std::optional<double> user = std::nullopt,
                                           std::optional<PickandsOptions> options = std::nullopt);

}  // namespace excursion
