#pragma once

// Reference quadrature for tests, written independently of the library rules.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// n-point Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> legendre(int n) {
  std::vector<double> x(n);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        break;
      }
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Gauss rule of order n on [lo, hi].
template <class F>
double gauss(F&& f, double lo, double hi, int n = 30) {
  static const auto rule = legendre(30);
  const auto& r = n == 30 ? rule : legendre(n);
  const double m = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < r.first.size(); ++i) {
    s += r.second[i] * f(m + h * r.first[i]);
  }
  return h * s;
}

/// Panels [lo + (hi-lo) 2^{-k-1}, lo + (hi-lo) 2^{-k}] accumulating at lo.
template <class F>
double gauss_geometric_left(F&& f, double lo, double hi, int levels = 60) {
  double s = 0.0;
  double right = hi;
  for (int k = 0; k < levels; ++k) {
    const double left = lo + 0.5 * (right - lo);
    s += gauss(f, left, right);
    right = left;
  }
  return s;
}

/// Same, accumulating at both ends.
template <class F>
double gauss_geometric_both(F&& f, double lo, double hi, int levels = 60) {
  const double mid = 0.5 * (lo + hi);
  return gauss_geometric_left(f, lo, mid, levels) +
         gauss_geometric_left([&](double x) { return f(lo + hi - x); }, lo, mid, levels);
}

} // namespace oracle
