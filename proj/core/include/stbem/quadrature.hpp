#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace stbem {

enum class RuleKind { plain, log, inv_sqrt };

/// Quadrature rule on [0, 1]. For `log` the rule integrates f1 + f2 log x,
/// for `inv_sqrt` it integrates f(t) t^{-1/2}, with smooth f, f1, f2.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind = RuleKind::plain;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s += weights[i] * f(nodes[i]);
    }
    return s;
  }
};

/// n-point Gauss–Legendre rule on [0, 1], 1 <= n <= 64.
QuadRule gauss_legendre(int n);

/// n-point generalized Gaussian rule for f1(x) + f2(x) log x on [0, 1],
/// 2 <= n <= 32. Exact for polynomials f1, f2 of degree < n. Orders where
/// the Newton construction stalls (n > 18) use graded_log_fallback(n, 20).
QuadRule gauss_log(int n);

/// Composite rule graded geometrically toward 0 with ratio 1/4; exact for
/// polynomials of degree 2n - 1 on each panel. Used when the Newton
/// construction of gauss_log does not converge.
QuadRule graded_log_fallback(int n, int depth);

/// Rule for f(t) t^{-1/2} on [0, 1] from the substitution t = u^2.
QuadRule gauss_inv_sqrt(int n);

/// Shared immutable rules, built once per (kind, n).
const QuadRule& cached_rule(RuleKind kind, int n);

/// Duffy splitting of [0,1]^2 into the triangles below and above the diagonal.
///
/// `diagonal`: f may be log-singular along x = y; the rule `ry` acts on the
/// distance to the diagonal so that a log rule there resolves it.
/// `corner`: f may be log-singular at the origin only.
enum class DuffyMode { diagonal, corner };

template <class F>
double duffy_square(F&& f, const QuadRule& rx, const QuadRule& ry,
                    DuffyMode mode = DuffyMode::diagonal) {
  double s = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double x = rx.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < ry.size(); ++j) {
      const double y = mode == DuffyMode::diagonal ? 1.0 - ry.nodes[j] : ry.nodes[j];
      inner += ry.weights[j] * (f(x, x * y) + f(x * y, x));
    }
    s += rx.weights[i] * x * inner;
  }
  return s;
}

/// The three tetrahedral Duffy maps of [0,1] x T̂, T̂ the reference triangle.
inline std::array<std::array<double, 3>, 3> prism_maps(double x, double y, double z) {
  return {{{x, x * (1.0 - y), x * y * z},
           {x * (1.0 - y), x * (1.0 - y * z), x * y * z},
           {x * (1.0 - y + y * z), x * (1.0 - y), x * y}}};
}

/// ∫_0^1 ∫_{T̂} f(x̂, ŷ, ẑ) via the three tetrahedral Duffy maps, Jacobian x̂² ŷ.
/// f is called with the image point (x̂, ŷ, ẑ) in [0,1] x T̂. Singularities
/// along {(x̂,ẑ) = (ŷ,0)} or at the origin are resolved by choosing log rules
/// in `rx` (and `ry` for the edge case).
template <class F>
double duffy_prism(F&& f, const QuadRule& rx, const QuadRule& ry, const QuadRule& rz) {
  double s = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double x = rx.nodes[i];
    for (std::size_t j = 0; j < ry.size(); ++j) {
      const double y = ry.nodes[j];
      const double jac = x * x * y;
      double inner = 0.0;
      for (std::size_t k = 0; k < rz.size(); ++k) {
        const auto maps = prism_maps(x, y, rz.nodes[k]);
        double v = 0.0;
        for (const auto& m : maps) {
          v += f(m[0], m[1], m[2]);
        }
        inner += rz.weights[k] * v;
      }
      s += rx.weights[i] * ry.weights[j] * jac * inner;
    }
  }
  return s;
}

} // namespace stbem
