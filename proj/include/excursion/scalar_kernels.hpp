// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace excursion {

inline constexpr int kMaxHermiteDegree = 64;

/// Probabilists' Hermite polynomial He_j(x), via the three-term recurrence
/// He_{j+1} = x He_j - j He_{j-1}. Rejects j outside [0, kMaxHermiteDegree].
double hermite(int j, double x);

/// Standard normal upper tail P{N(0,1) >= u}.
///
/// Evaluated as erfc(u/sqrt 2)/2, which is relative-accurate in the far tail
/// (no 1 - Phi cancellation). Checked against adaptive quadrature of the
/// defining integral: absolute error below 1e-14 on [-8, 40].
double gaussian_tail(double u);

/// Scaled tail e^{u^2/2} Psi(u) (= Mills ratio times the standard normal
/// density at 0). Finite where Psi itself underflows (u > ~38); continued
/// fraction for u >= 5. Overflows to +inf for u < ~-37.
double gaussian_tail_scaled(double u);

/// EEC kernel: gaussian_tail(u) for j = 0, otherwise
/// (2 pi)^{-(j+1)/2} He_{j-1}(u) exp(-u^2/2).
double beta_kernel(int j, double u);

}  // namespace excursion
