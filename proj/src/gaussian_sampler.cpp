// SPDX-License-Identifier: Apache-2.0
#include "excursion/gaussian_sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "excursion/error.hpp"

namespace excursion {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t replication) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ replication));
}

GaussianSampler::GaussianSampler(Eigen::MatrixXd covariance, JitterPolicy policy) {
    const Eigen::Index n = covariance.rows();
    if (n == 0 || covariance.cols() != n) throw ValidationError("covariance matrix must be square and non-empty");
    const double mean_diag = covariance.diagonal().mean();
    if (!(mean_diag > 0.0)) throw NumericalError("covariance matrix has non-positive mean diagonal");

    for (double eps = policy.initial; eps <= policy.maximum * (1.0 + 1e-9); eps *= 2.0) {
        Eigen::MatrixXd work = covariance;
        work.diagonal().array() += eps * mean_diag;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
        if (llt.info() == Eigen::Success) {
            factor_ = std::move(work);
            factor_.triangularView<Eigen::StrictlyUpper>().setZero();
            jitter_ = eps;
            return;
        }
    }
    throw NumericalError("covariance factorization failed at maximal jitter " + std::to_string(policy.maximum) +
                         " (matrix size " + std::to_string(n) + ")");
}

void GaussianSampler::sample_block(std::uint64_t seed, std::uint64_t first, Eigen::Index count,
                                   Eigen::MatrixXd& out) const {
    const Eigen::Index n = size();
    Eigen::MatrixXd normals(n, count);
    std::normal_distribution<double> normal;
    for (Eigen::Index c = 0; c < count; ++c) {
        auto engine = replication_engine(seed, first + static_cast<std::uint64_t>(c));
        normal.reset();
        for (Eigen::Index i = 0; i < n; ++i) normals(i, c) = normal(engine);
    }
    out.resize(n, count);
    out.noalias() = factor_.triangularView<Eigen::Lower>() * normals;
}

Eigen::MatrixXd covariance_matrix(Eigen::Index n, const std::function<double(Eigen::Index, Eigen::Index)>& kernel) {
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = kernel(i, j);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EXCURSION_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for_blocks(std::size_t blocks, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++) {
                try {
                    fn(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = blocks;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(const double* values, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

}  // namespace excursion
