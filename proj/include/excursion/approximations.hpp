// SPDX-License-Identifier: Apache-2.0
//
// Analytic excursion-probability approximations:
//   EEC       sum_j (-2 rho'(0))^{j/2} L_j(D) beta_j(u)      smooth isotropic fields
//   Pickands  Vol(D) c^{k/alpha} H_{alpha,k} u^{2k/alpha} Psi(u)   locally isotropic fields
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "excursion/covariance.hpp"
#include "excursion/lk_curvatures.hpp"

namespace excursion {

enum class ApproxMethod { kEec, kPickands };

/// Where a Pickands constant came from.
enum class ConstantProvenance { kNone, kExact, kMonteCarlo, kUser };

std::string to_string(ApproxMethod m);
std::string to_string(ConstantProvenance p);

struct PickandsConstant {
    double value = 0.0;
    ConstantProvenance provenance = ConstantProvenance::kUser;
    double standard_error = 0.0;
};

struct ApproxResult {
    double u = 0.0;
    double total = 0.0;
    std::vector<double> terms;
    ApproxMethod method = ApproxMethod::kEec;
    std::string model;
    std::string domain;
    PickandsConstant pickands_constant{0.0, ConstantProvenance::kNone, 0.0};
    /// Free-form qualifications, e.g. "boundary untreated".
    std::vector<std::string> notes;
};

/// Expected Euler characteristic of the excursion set above u. Also the
/// excursion-probability approximation (error super-exponentially small).
ApproxResult eec_approx(const SmoothIsotropicModel& model, const Domain& d, double u);

/// Pickands-type approximation for a full-dimensional domain (k = N).
ApproxResult pickands_approx(const LocallyIsotropicModel& model, const Domain& d, double u,
                             const PickandsConstant& h);

/// Pickands-type approximation for a k-dimensional domain, k <= N; Vol(D) is
/// the induced-metric volume and H must be H_{alpha,k}.
ApproxResult pickands_approx_submanifold(const LocallyIsotropicModel& model, const Domain& d, double u,
                                         const PickandsConstant& h);

/// Exact H_{2,N} = pi^{-N/2}.
PickandsConstant exact_pickands_constant_alpha2(int dim);

/// Axis-aligned chart region prod_i [lower_i, upper_i].
struct ChartBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Default cells per axis for euclidean_det_integral in two dimensions.
inline constexpr int kDefaultDetIntegralPoints = 512;

/// Midpoint-rule integral of |det B(t)| over `region` on a tensor grid with
/// points_per_axis[i] cells along axis i. Deterministic pairwise summation.
double euclidean_det_integral(const MatrixField& b, const ChartBox& region,
                              const std::vector<int>& points_per_axis, unsigned threads = 1);

/// B(t) = c^{1/alpha} G^{1/2}(t) in the given chart of the model's manifold.
MatrixField pickands_matrix_field(const LocallyIsotropicModel& model, int chart = 0);

}  // namespace excursion
