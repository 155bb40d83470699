// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace excursion {

/// Diagonal jitter schedule for covariance factorization: eps * mean(diag)
/// is added, eps doubling from `initial` until the factorization succeeds or
/// exceeds `maximum`.
struct JitterPolicy {
    double initial = 1e-12;
    double maximum = 1e-6;
};

/// Per-replication random stream: replication i draws from a generator
/// seeded with mix(mix(seed) ^ i), so any subset of replications can be produced
/// independently and in any order.
std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t replication);

/// Exact sampler for N(0, C) built from a lower Cholesky factor of C + jitter.
class GaussianSampler {
public:
    /// Throws NumericalError when the factorization fails at maximal jitter.
    explicit GaussianSampler(Eigen::MatrixXd covariance, JitterPolicy policy = {});

    [[nodiscard]] Eigen::Index size() const noexcept { return factor_.rows(); }
    /// Relative jitter eps that was needed (the added diagonal is eps * mean(diag)).
    [[nodiscard]] double jitter() const noexcept { return jitter_; }
    [[nodiscard]] const Eigen::MatrixXd& factor() const noexcept { return factor_; }

    /// Fills `out` (size() x count) with replications first..first+count-1.
    void sample_block(std::uint64_t seed, std::uint64_t first, Eigen::Index count, Eigen::MatrixXd& out) const;

private:
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

/// Builds the covariance matrix K(i, j) = kernel(i, j) (symmetric fill).
Eigen::MatrixXd covariance_matrix(Eigen::Index n, const std::function<double(Eigen::Index, Eigen::Index)>& kernel);

/// Replications are processed in fixed-size blocks so that results do not
/// depend on the thread count.
inline constexpr Eigen::Index kReplicationBlock = 256;

/// Worker count: `requested` if > 0, else $EXCURSION_THREADS, else hardware.
unsigned resolve_threads(unsigned requested);

/// Runs fn(block_index) for block_index in [0, blocks) on up to `threads`
/// workers. Exceptions from workers are rethrown on the caller.
void parallel_for_blocks(std::size_t blocks, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) summation; the order depends only on the input size.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace excursion
