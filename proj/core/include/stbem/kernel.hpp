#pragma once

#include "stbem/geometry.hpp"

namespace stbem {

/// Exponential integral Ei(x) = -int_{-x}^inf e^{-y}/y dy for x < 0.
///
/// Power series for |x| <= 1, Chebyshev expansions on [2^k, 2^{k+1}] up to
/// 128, continued fraction for E1(-x) beyond. Returns 0 once x < -700 (the true value underflows in double precision).
/// Throws std::domain_error for x >= 0.
double expint_ei(double x);

/// e^u * E1(u) for u > 0; the scaled form keeps 𝔊_t accurate for large u.
double expint_e1_scaled(double u);

/// Heat kernel in two space dimensions; exactly 0 for t <= 0.
double heat_G(double t, Point2 x);

/// Same kernel with the squared distance already at hand.
double heat_G_r2(double t, double r2);

/// Time antiderivative of G:  𝔤_t(x) = Ei(-|x|^2/(4t)) / (4π), 0 for t <= 0.
/// Throws std::domain_error when t > 0 and r2 == 0 (log singularity).
double frak_g(double t, double r2);

/// Second time antiderivative of G:
///   𝔊_t(x) = (t e^{-u} + t (1+u) Ei(-u)) / (4π),  u = |x|^2/(4t),
/// 0 for t <= 0. Same singular-argument error as frak_g.
double frak_G(double t, double r2);

/// Squared radius beyond which 𝔤_t, 𝔊_t and G are below e^{-40} relative to
/// their scale and are treated as zero by the integrators.
inline constexpr double kCutoffExponent = 40.0;
inline double cutoff_r2(double t) { return 4.0 * t * kCutoffExponent; }

} // namespace stbem
