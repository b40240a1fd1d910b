#pragma once

#include "stbem/geometry.hpp"
#include "stbem/kernel.hpp"
#include "stbem/mesh.hpp"
#include "stbem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace stbem {

/// Quadrature orders shared by every integrator.
struct QuadOrders {
  int plain = 12;
  int log = 16;
  int inv_sqrt = 12;
  /// Largest change of |x|^2 / (4 tau) across one panel.
  double panel_exponent = 4.0;
};

enum class KernelKind { heat, g, GG };

struct KernelTerm {
  double tau = 0.0;
  double coeff = 0.0;
};

/// Σ coeff_i K_{tau_i}(r2) for one kernel family. All terms are integrated
/// by the same quadrature so that differences of nearby times cancel
/// consistently. Terms with tau <= 0 vanish by causality and are dropped.
class CombinedKernel {
public:
  CombinedKernel(KernelKind kind, std::vector<KernelTerm> terms);

  KernelKind kind() const { return kind_; }
  const std::vector<KernelTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(double r2) const;

  /// Squared radius beyond which every term is cut off.
  double cutoff_r2() const { return cutoff_; }

  /// 4 tau of the smallest term still active at squared radius r2; the
  /// length scale on which the kernel varies there. Infinite if none.
  double scale2(double r2) const;

private:
  KernelKind kind_;
  std::vector<KernelTerm> terms_; // ascending tau
  double cutoff_ = 0.0;
};

/// Straight piece of Γ: p0 + z u, z in [0, len].
struct Segment {
  Point2 p0;
  Point2 u;
  double len = 0.0;

  Point2 at(double z) const { return p0 + z * u; }
  Point2 p1() const { return at(len); }
};

Segment arc_segment(const BoundaryCurve& curve, double c, double d);

/// ∫_lo^hi f(x) dx for an integrand built from a combined kernel evaluated
/// at r2 = alpha x^2. Panels follow the kernel scale and grow at most
/// geometrically away from the log singularity at x = 0; a panel starting
/// at 0 uses the log rule when `log_at_zero` is set.
template <class F>
double graded_integral(F&& f, double lo, double hi, double alpha, const CombinedKernel& k,
                       const QuadOrders& q, bool log_at_zero = true) {
  const QuadRule& plain = cached_rule(RuleKind::plain, q.plain);
  const QuadRule& logr = cached_rule(RuleKind::log, q.log);
  double sum = 0.0;
  double x0 = lo;
  for (int guard = 0; x0 < hi && guard < 4096; ++guard) {
    const double r2lo = alpha * x0 * x0;
    if (r2lo >= k.cutoff_r2()) {
      break;
    }
    const double s2 = k.scale2(r2lo);
    double w = std::isfinite(s2) ? std::sqrt(x0 * x0 + q.panel_exponent * s2 / alpha) - x0 : hi - x0;
    if (x0 > 0.0) {
      w = std::min(w, x0);
    }
    const double x1 = std::min(hi, x0 + w);
    const double len = x1 - x0;
    const QuadRule& r = (x0 == 0.0 && log_at_zero) ? logr : plain;
    double part = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      part += r.weights[i] * f(x0 + len * r.nodes[i]);
    }
    sum += len * part;
    x0 = x1;
  }
  return sum;
}

/// ∫_K ∫_K̃ k(|x - y|^2) dy dx over two arcs of Γ.
double arc_pair_integral(const BoundaryCurve& curve, const SpaceArc& k, const SpaceArc& kt,
                         const CombinedKernel& kernel, const QuadOrders& q);

/// Same for two straight segments: equal, touching at an endpoint, or disjoint.
double segment_pair_integral(const Segment& a, const Segment& b, const CombinedKernel& kernel,
                             const QuadOrders& q);

/// ∫_K̃ k(|x - y|^2) dy for a point x of Γ (possibly on K̃).
double point_arc_integral(const BoundaryCurve& curve, Point2 x, const SpaceArc& kt,
                          const CombinedKernel& kernel, const QuadOrders& q);

double point_segment_integral(Point2 x, const Segment& seg, const CombinedKernel& kernel, const QuadOrders& q);

/// ∫_T k(|x - y|^2) u0(y) dy in polar coordinates around x, for x outside
/// or on the boundary of the triangle.
double point_triangle_integral(Point2 x, const CurvilinearTriangle& t, const CombinedKernel& kernel,
                               const std::function<double(Point2)>& u0, const QuadOrders& q);

/// Gauss panels on [0, len] graded toward both ends at the given length
/// scale; returns nodes and weights (in z).
void graded_panels_both_ends(double len, double scale, int order, std::vector<double>& z,
                             std::vector<double>& w);

/// Same with grading only toward the selected ends; plain Gauss if neither.
void graded_panels(double len, double scale, int order, bool left, bool right, std::vector<double>& z,
                   std::vector<double>& w);

} // namespace stbem
