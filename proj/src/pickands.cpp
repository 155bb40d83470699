// SPDX-License-Identifier: Apache-2.0
#include "excursion/pickands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "excursion/error.hpp"

namespace excursion {

std::string to_string(PickandsEstimator e) {
    return e == PickandsEstimator::kSupNormalized ? "sup_normalized" : "defining_limit";
}

PickandsEstimator pickands_estimator_from_string(const std::string& name) {
    if (name == "sup_normalized") return PickandsEstimator::kSupNormalized;
    if (name == "defining_limit") return PickandsEstimator::kDefiningLimit;
    throw ValidationError("unknown estimator '" + name + "' (sup_normalized | defining_limit)",
                          "pickands.estimator");
}

PickandsOptions default_pickands_options(double alpha, int dim) {
    PickandsOptions o;
    o.alpha = alpha;
    o.dim = dim;
    switch (dim) {
        case 1:
            o.cube_side = 8.0;
            o.spacing = 0.05;
            o.reps = 10000;
            break;
        case 2:
            o.cube_side = 4.0;
            o.spacing = 0.1;
            o.reps = 5000;
            break;
        default:
            o.cube_side = 2.0;
            o.spacing = 0.2;
            o.reps = 2000;
            break;
    }
    return o;
}

std::vector<Eigen::VectorXd> pickands_lattice(int dim, double cube_side, double spacing,
                                              PickandsEstimator estimator) {
    if (dim < 1) throw ValidationError("dimension must be >= 1", "pickands.dim");
    if (!(spacing > 0.0)) throw ValidationError("spacing must be > 0", "pickands.spacing");
    const auto steps = static_cast<long>(std::floor(cube_side / spacing + 1e-9));
    long lo = 0;
    long hi = steps;
    if (estimator == PickandsEstimator::kSupNormalized) {
        lo = -steps / 2;
        hi = steps / 2;
    }
    const long per_axis = hi - lo + 1;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis);

    std::vector<Eigen::VectorXd> points;
    points.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Eigen::VectorXd s(dim);
        std::size_t rem = idx;
        for (int i = 0; i < dim; ++i) {
            s[i] = static_cast<double>(lo + static_cast<long>(rem % per_axis)) * spacing;
            rem /= per_axis;
        }
        points.push_back(std::move(s));
    }
    return points;
}

DriftedFieldSampler::DriftedFieldSampler(double alpha, std::vector<Eigen::VectorXd> lattice, JitterPolicy jitter)
    : alpha_(alpha), lattice_(std::move(lattice)) {
    if (!(alpha_ > 0.0 && alpha_ <= 2.0)) throw ValidationError("alpha must lie in (0, 2]", "pickands.alpha");
    if (lattice_.empty()) throw ValidationError("lattice is empty", "pickands.K");

    std::vector<Eigen::Index> free_points;
    free_index_.assign(lattice_.size(), -1);
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        if (lattice_[i].norm() > 0.0) {
            free_index_[i] = static_cast<Eigen::Index>(free_points.size());
            free_points.push_back(static_cast<Eigen::Index>(i));
        }
    }
    const auto n = static_cast<Eigen::Index>(free_points.size());
    drift_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) drift_[i] = std::pow(lattice_[free_points[i]].norm(), alpha_);
    if (n == 0) return;

    const Eigen::MatrixXd cov = covariance_matrix(n, [&](Eigen::Index i, Eigen::Index j) {
        const double dist = (lattice_[free_points[i]] - lattice_[free_points[j]]).norm();
        return 0.5 * (drift_[i] + drift_[j] - std::pow(dist, alpha_));
    });
    sampler_.emplace(cov, jitter);
}

void DriftedFieldSampler::sample_block(std::uint64_t seed, std::uint64_t first, Eigen::Index count,
                                       Eigen::MatrixXd& out) const {
    out.setZero(static_cast<Eigen::Index>(lattice_.size()), count);
    if (!sampler_) return;
    Eigen::MatrixXd w;
    sampler_->sample_block(seed, first, count, w);
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const Eigen::Index f = free_index_[i];
        if (f < 0) continue;
        out.row(static_cast<Eigen::Index>(i)) = std::numbers::sqrt2 * w.row(f).array() - drift_[f];
    }
}

Eigen::VectorXd simulate_z(double alpha, const std::vector<Eigen::VectorXd>& lattice, std::uint64_t seed) {
    const DriftedFieldSampler sampler(alpha, lattice);
    Eigen::MatrixXd out;
    sampler.sample_block(seed, 0, 1, out);
    return out.col(0);
}

PickandsEstimate estimate_pickands(const PickandsOptions& o) {
    if (!(o.alpha > 0.0 && o.alpha <= 2.0)) throw ValidationError("alpha must lie in (0, 2]", "pickands.alpha");
    if (o.dim < 1) throw ValidationError("dimension must be >= 1", "pickands.dim");
    if (!(o.cube_side >= 1.0)) throw ValidationError("cube side K must be >= 1", "pickands.K");
    if (!(o.spacing > 0.0 && o.spacing <= 0.25)) {
        throw ValidationError("spacing must lie in (0, 0.25]", "pickands.spacing");
    }
    if (o.reps < 1000) throw ValidationError("at least 1000 replications are required", "pickands.reps");

    const DriftedFieldSampler sampler(o.alpha, pickands_lattice(o.dim, o.cube_side, o.spacing, o.estimator),
                                      o.jitter);
    const double cell = std::pow(o.spacing, o.dim);
    const double cube_volume = std::pow(o.cube_side, o.dim);

    std::vector<double> stat(o.reps);
    const std::size_t blocks = (o.reps + kReplicationBlock - 1) / kReplicationBlock;
    parallel_for_blocks(blocks, resolve_threads(o.threads), [&](std::size_t b) {
        const std::size_t first = b * kReplicationBlock;
        const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(kReplicationBlock, o.reps - first));
        Eigen::MatrixXd z;
        sampler.sample_block(o.seed, first, count, z);
        for (Eigen::Index c = 0; c < count; ++c) {
            const double top = z.col(c).maxCoeff();
            double value = 0.0;
            if (o.estimator == PickandsEstimator::kSupNormalized) {
                const double mass = (z.col(c).array() - top).exp().sum();
                value = 1.0 / (cell * mass);
            } else {
                value = std::expm1(std::max(top, 0.0)) / cube_volume;
            }
            stat[first + static_cast<std::size_t>(c)] = value;
        }
    });

    const double mean = pairwise_sum(stat.data(), stat.size()) / static_cast<double>(o.reps);
    std::vector<double> sq(o.reps);
    for (std::size_t i = 0; i < o.reps; ++i) sq[i] = (stat[i] - mean) * (stat[i] - mean);
    const double var = pairwise_sum(sq.data(), sq.size()) / static_cast<double>(o.reps - 1);

    PickandsEstimate e;
    e.alpha = o.alpha;
    e.dim = o.dim;
    e.cube_side = o.cube_side;
    e.spacing = o.spacing;
    e.reps = o.reps;
    e.seed = o.seed;
    e.estimate = mean;
    e.standard_error = std::sqrt(var / static_cast<double>(o.reps));
    e.estimator = o.estimator;
    e.lattice_size = sampler.size();
    e.jitter = sampler.jitter();
    return e;
}

PickandsConstant resolve_pickands_constant(double alpha, int dim, std::optional<double> user,
                                           std::optional<PickandsOptions> options) {
    if (user) {
        if (!(*user > 0.0) || !std::isfinite(*user)) {
            throw ValidationError("Pickands constant must be finite and > 0", "pickands.H");
        }
        return {*user, ConstantProvenance::kUser, 0.0};
    }
    if (alpha == 2.0) return exact_pickands_constant_alpha2(dim);
    PickandsOptions o = options.value_or(default_pickands_options(alpha, dim));
    o.alpha = alpha;
    o.dim = dim;
    const PickandsEstimate e = estimate_pickands(o);
    return {e.estimate, ConstantProvenance::kMonteCarlo, e.standard_error};
}

}  // namespace excursion
