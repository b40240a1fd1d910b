#include "stbem/integrators.hpp"

#include <array>
#include <stdexcept>

namespace stbem {

namespace {

constexpr double kGeomTol = 1e-13;

// Order of a tensor Gauss rule for pieces separated by R times their length.
int separated_order(double ratio, int plain) {
  int p = plain;
  if (ratio >= 16.0) {
    p = 3;
  } else if (ratio >= 8.0) {
    p = 4;
  } else if (ratio >= 4.0) {
    p = 6;
  } else if (ratio >= 2.0) {
    p = 8;
  }
  return std::min(p, plain);
}

double equal_segments(double len, const CombinedKernel& k, const QuadOrders& q) {
  // ∫∫ k((x - y)^2) over [0, len]^2 = 2 ∫_0^len (len - z) k(z^2) dz.
  const double a2 = len * len;
  auto f = [&](double x) { return (1.0 - x) * k(a2 * x * x); };
  return 2.0 * a2 * graded_integral(f, 0.0, 1.0, a2, k, q);
}

// Two pieces of equal length leaving a common vertex with cos(angle) = cphi.
double touching_equal(double len, double cphi, const CombinedKernel& k, const QuadOrders& q) {
  const QuadRule& ry = cached_rule(RuleKind::plain, q.plain);
  const double a2 = len * len;
  double sum = 0.0;
  for (std::size_t j = 0; j < ry.size(); ++j) {
    const double y = ry.nodes[j];
    const double alpha = a2 * (1.0 + y * y - 2.0 * y * cphi);
    auto f = [&](double x) { return x * k(alpha * x * x); };
    sum += ry.weights[j] * graded_integral(f, 0.0, 1.0, alpha, k, q);
  }
  return 2.0 * a2 * sum;
}

double tensor_pair(const Segment& a, const Segment& b, int p, const CombinedKernel& k) {
  const QuadRule& r = cached_rule(RuleKind::plain, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 x = a.at(a.len * r.nodes[i]);
    double inner = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      inner += r.weights[j] * k(norm2(x - b.at(b.len * r.nodes[j])));
    }
    sum += r.weights[i] * inner;
  }
  return sum * a.len * b.len;
}

std::pair<Segment, Segment> halves(const Segment& s) {
  const double h = 0.5 * s.len;
  return {{s.p0, s.u, h}, {s.at(h), s.u, s.len - h}};
}

double max_endpoint_dist2(const Segment& a, const Segment& b) {
  double m = 0.0;
  for (Point2 x : {a.p0, a.p1()}) {
    for (Point2 y : {b.p0, b.p1()}) {
      m = std::max(m, norm2(x - y));
    }
  }
  return m;
}

double disjoint_pair(const Segment& a, const Segment& b, const CombinedKernel& k, const QuadOrders& q,
                     int depth) {
  const double r2min = segment_segment_dist2(a.p0, a.p1(), b.p0, b.p1());
  if (r2min >= k.cutoff_r2()) {
    return 0.0;
  }
  const double r2max = max_endpoint_dist2(a, b);
  const double s2 = k.scale2(r2min);
  const double lmax = std::max(a.len, b.len);
  const double dist = std::sqrt(r2min);
  const bool admissible = lmax <= dist && (r2max - r2min) <= q.panel_exponent * s2;
  if (admissible || depth > 60) {
    return tensor_pair(a, b, admissible ? separated_order(dist / lmax, q.plain) : q.plain, k);
  }
  if (a.len >= b.len) {
    const auto [a0, a1] = halves(a);
    return disjoint_pair(a0, b, k, q, depth + 1) + disjoint_pair(a1, b, k, q, depth + 1);
  }
  const auto [b0, b1] = halves(b);
  return disjoint_pair(a, b0, k, q, depth + 1) + disjoint_pair(a, b1, k, q, depth + 1);
}

bool same_point(Point2 x, Point2 y, double scale) { return norm2(x - y) <= kGeomTol * kGeomTol * scale * scale; }

double disjoint_point(Point2 x, const Segment& s, const CombinedKernel& k, const QuadOrders& q, int depth) {
  const double r2min = point_segment_dist2(x, s.p0, s.p1());
  if (r2min >= k.cutoff_r2()) {
    return 0.0;
  }
  const double r2max = std::max(norm2(x - s.p0), norm2(x - s.p1()));
  const double s2 = k.scale2(r2min);
  const double dist = std::sqrt(r2min);
  const bool admissible = s.len <= dist && (r2max - r2min) <= q.panel_exponent * s2;
  if (admissible || depth > 60) {
    const QuadRule& r = cached_rule(RuleKind::plain, admissible ? separated_order(dist / s.len, q.plain) : q.plain);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      sum += r.weights[i] * k(norm2(x - s.at(s.len * r.nodes[i])));
    }
    return sum * s.len;
  }
  const auto [s0, s1] = halves(s);
  return disjoint_point(x, s0, k, q, depth + 1) + disjoint_point(x, s1, k, q, depth + 1);
}

} // namespace

CombinedKernel::CombinedKernel(KernelKind kind, std::vector<KernelTerm> terms) : kind_(kind) {
  std::sort(terms.begin(), terms.end(), [](const KernelTerm& x, const KernelTerm& y) { return x.tau < y.tau; });
  for (const KernelTerm& t : terms) {
    if (!(t.tau > 0.0) || t.coeff == 0.0) {
      continue;
    }
    if (!terms_.empty() && terms_.back().tau == t.tau) {
      terms_.back().coeff += t.coeff;
      if (terms_.back().coeff == 0.0) {
        terms_.pop_back();
      }
      continue;
    }
    terms_.push_back(t);
  }
  cutoff_ = terms_.empty() ? 0.0 : stbem::cutoff_r2(terms_.back().tau);
}

double CombinedKernel::operator()(double r2) const {
  double sum = 0.0;
  for (const KernelTerm& t : terms_) {
    if (r2 >= stbem::cutoff_r2(t.tau)) {
      continue;
    }
    switch (kind_) {
    case KernelKind::heat:
      sum += t.coeff * heat_G_r2(t.tau, r2);
      break;
    case KernelKind::g:
      sum += t.coeff * frak_g(t.tau, r2);
      break;
    case KernelKind::GG:
      sum += t.coeff * frak_G(t.tau, r2);
      break;
    }
  }
  return sum;
}

double CombinedKernel::scale2(double r2) const {
  for (const KernelTerm& t : terms_) {
    if (r2 < stbem::cutoff_r2(t.tau)) {
      return 4.0 * t.tau;
    }
  }
  return std::numeric_limits<double>::infinity();
}

Segment arc_segment(const BoundaryCurve& curve, double c, double d) {
  if (!(c < d) || curve.crosses_corner(c, d)) {
    throw std::invalid_argument("arc_segment: arc is empty or crosses a corner");
  }
  const std::size_t side = curve.side_of(0.5 * (c + d));
  return {curve.gamma(c), curve.tangent(side), d - c};
}

double segment_pair_integral(const Segment& a, const Segment& b, const CombinedKernel& k, const QuadOrders& q) {
  if (k.empty()) {
    return 0.0;
  }
  const double scale = std::max(a.len, b.len);
  // Collinear and overlapping: split at the union of endpoints.
  const bool parallel = std::abs(cross(a.u, b.u)) <= kGeomTol;
  const bool on_line = std::abs(cross(b.p0 - a.p0, a.u)) <= kGeomTol * (1.0 + scale);
  if (parallel && on_line) {
    const double z0 = dot(b.p0 - a.p0, a.u);
    const double z1 = z0 + b.len * dot(b.u, a.u);
    const double lo = std::min(z0, z1);
    const double hi = std::max(z0, z1);
    const double ov = std::min(hi, a.len) - std::max(lo, 0.0);
    if (ov > kGeomTol * scale) {
      if (std::abs(lo) <= kGeomTol * scale && std::abs(hi - a.len) <= kGeomTol * scale) {
        return equal_segments(a.len, k, q);
      }
      std::vector<double> cuts{0.0, a.len, lo, hi};
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [&](double x, double y) { return std::abs(x - y) <= kGeomTol * scale; }),
                 cuts.end());
      std::vector<Segment> pa;
      std::vector<Segment> pb;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double m = 0.5 * (cuts[i] + cuts[i + 1]);
        const Segment piece{a.at(cuts[i]), a.u, cuts[i + 1] - cuts[i]};
        if (m > 0.0 && m < a.len) {
          pa.push_back(piece);
        }
        if (m > lo && m < hi) {
          pb.push_back(piece);
        }
      }
      double sum = 0.0;
      for (const Segment& x : pa) {
        for (const Segment& y : pb) {
          sum += segment_pair_integral(x, y, k, q);
        }
      }
      return sum;
    }
  }
  // Touching at an endpoint.
  const std::array<Point2, 2> ea{a.p0, a.p1()};
  const std::array<Point2, 2> eb{b.p0, b.p1()};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!same_point(ea[i], eb[j], scale)) {
        continue;
      }
      const Point2 v = ea[i];
      const Point2 e1 = i == 0 ? a.u : -1.0 * a.u;
      const Point2 e2 = j == 0 ? b.u : -1.0 * b.u;
      const double cphi = dot(e1, e2);
      if (std::abs(a.len - b.len) <= kGeomTol * scale) {
        return touching_equal(a.len, cphi, k, q);
      }
      const bool a_long = a.len > b.len;
      const double ls = std::min(a.len, b.len);
      // Split the longer piece at the length of the shorter one.
      const Point2 el = a_long ? e1 : e2;
      const Segment far{v + ls * el, el, std::max(a.len, b.len) - ls};
      return touching_equal(ls, cphi, k, q) + disjoint_pair(far, a_long ? b : a, k, q, 0);
    }
  }
  return disjoint_pair(a, b, k, q, 0);
}

double arc_pair_integral(const BoundaryCurve& curve, const SpaceArc& k, const SpaceArc& kt,
                         const CombinedKernel& kernel, const QuadOrders& q) {
  if (kernel.empty()) {
    return 0.0;
  }
  return segment_pair_integral(arc_segment(curve, k.c, k.d), arc_segment(curve, kt.c, kt.d), kernel, q);
}

double point_segment_integral(Point2 x, const Segment& s, const CombinedKernel& k, const QuadOrders& q) {
  if (k.empty()) {
    return 0.0;
  }
  const Point2 rel = x - s.p0;
  const double z0 = dot(rel, s.u);
  const double perp = std::abs(cross(rel, s.u));
  const double tol = kGeomTol * (1.0 + s.len);
  if (perp <= tol && z0 >= -tol && z0 <= s.len + tol) {
    const double z = std::clamp(z0, 0.0, s.len);
    auto f = [&](double r) { return k(r * r); };
    double sum = 0.0;
    if (z > tol) {
      sum += graded_integral(f, 0.0, z, 1.0, k, q);
    }
    if (s.len - z > tol) {
      sum += graded_integral(f, 0.0, s.len - z, 1.0, k, q);
    }
    return sum;
  }
  return disjoint_point(x, s, k, q, 0);
}

double point_arc_integral(const BoundaryCurve& curve, Point2 x, const SpaceArc& kt, const CombinedKernel& kernel,
                          const QuadOrders& q) {
  if (kernel.empty()) {
    return 0.0;
  }
  return point_segment_integral(x, arc_segment(curve, kt.c, kt.d), kernel, q);
}

double point_triangle_integral(Point2 x, const CurvilinearTriangle& t, const CombinedKernel& k,
                               const std::function<double(Point2)>& u0, const QuadOrders& q) {
  if (k.empty()) {
    return 0.0;
  }
  const std::array<Point2, 3> v{t.p0, t.p1, t.p2};
  const double diam = t.diameter();
  double d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    d2 = std::min(d2, point_segment_dist2(x, v[i], v[(i + 1) % 3]));
  }
  if (d2 >= k.cutoff_r2()) {
    return 0.0;
  }
  const double orient = t.det() > 0.0 ? 1.0 : -1.0;
  std::array<Point2, 3> normal;
  std::array<double, 3> g0;
  for (int i = 0; i < 3; ++i) {
    const Point2 e = v[(i + 1) % 3] - v[i];
    normal[i] = orient * Point2{-e.y, e.x};
    g0[i] = dot(normal[i], x - v[i]);
    if (std::abs(g0[i]) <= kGeomTol * diam * norm(e)) {
      g0[i] = 0.0;
    }
  }
  const Point2 centroid = (1.0 / 3.0) * (v[0] + v[1] + v[2]);
  const Point2 dref = (1.0 / norm(centroid - x)) * (centroid - x);
  std::vector<double> angles;
  for (const Point2& p : v) {
    const Point2 r = p - x;
    if (norm2(r) <= kGeomTol * kGeomTol * diam * diam) {
      continue;
    }
    angles.push_back(std::atan2(cross(dref, r), dot(dref, r)));
  }
  std::sort(angles.begin(), angles.end());
  auto direction = [&](double th) {
    const double cs = std::cos(th);
    const double sn = std::sin(th);
    return Point2{cs * dref.x - sn * dref.y, sn * dref.x + cs * dref.y};
  };
  // Clips the ray x + r e against the three edges; returns the bounding edges.
  auto clip = [&](Point2 e, double& rin, double& rout, int& jin, int& jout) {
    rin = 0.0;
    rout = std::numeric_limits<double>::infinity();
    jin = jout = -1;
    for (int j = 0; j < 3; ++j) {
      const double g1 = dot(normal[j], e);
      if (g1 > 0.0 && -g0[j] / g1 > rin) {
        rin = -g0[j] / g1;
        jin = j;
      } else if (g1 < 0.0 && -g0[j] / g1 < rout) {
        rout = -g0[j] / g1;
        jout = j;
      } else if (g1 == 0.0 && g0[j] < 0.0) {
        return false;
      }
    }
    return rout > rin;
  };
  // The ray length blows up where the bounding edge turns parallel to the
  // ray; angular pieces are kept no wider than their distance to that angle.
  auto pole_distance = [&](int j, double th0, double th1) {
    if (j < 0 || g0[j] == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    const Point2 e = v[(j + 1) % 3] - v[j];
    const double p = std::atan2(cross(dref, e), dot(dref, e));
    double best = std::numeric_limits<double>::infinity();
    for (double pole : {p - 2.0 * M_PI, p - M_PI, p, p + M_PI, p + 2.0 * M_PI}) {
      best = std::min(best, pole < th0 ? th0 - pole : (pole > th1 ? pole - th1 : 0.0));
    }
    return best;
  };
  const QuadRule& rt = cached_rule(RuleKind::plain, q.plain);
  std::vector<std::pair<double, double>> stack;
  for (std::size_t s = 0; s + 1 < angles.size(); ++s) {
    if (angles[s + 1] - angles[s] > 1e-15) {
      stack.emplace_back(angles[s], angles[s + 1]);
    }
  }
  double sum = 0.0;
  while (!stack.empty()) {
    const auto [th0, th1] = stack.back();
    stack.pop_back();
    double rin = 0.0;
    double rout = 0.0;
    int jin = -1;
    int jout = -1;
    clip(direction(0.5 * (th0 + th1)), rin, rout, jin, jout);
    const double dist = std::min(pole_distance(jin, th0, th1), pole_distance(jout, th0, th1));
    if (th1 - th0 > dist && th1 - th0 > 1e-12) {
      const double mid = 0.5 * (th0 + th1);
      stack.emplace_back(th0, mid);
      stack.emplace_back(mid, th1);
      continue;
    }
    double sector = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) {
      const Point2 e = direction(th0 + (th1 - th0) * rt.nodes[i]);
      if (!clip(e, rin, rout, jin, jout)) {
        continue;
      }
      auto f = [&](double r) { return k(r * r) * u0(x + r * e) * r; };
      sector += rt.weights[i] * graded_integral(f, rin, rout, 1.0, k, q);
    }
    sum += (th1 - th0) * sector;
  }
  return sum;
}

void graded_panels(double len, double scale, int order, bool left, bool right, std::vector<double>& z,
                   std::vector<double>& w) {
  z.clear();
  w.clear();
  std::vector<double> all{0.0, len};
  if (left || right) {
    // Widths scale, scale, 2 scale, 4 scale, ... away from a graded end.
    const double reach = (left && right) ? 0.5 * len : len;
    double width = std::max(scale, 1e-300);
    double pos = 0.0;
    while (pos + width < reach) {
      pos += width;
      if (left) {
        all.push_back(pos);
      }
      if (right) {
        all.push_back(len - pos);
      }
      if (pos >= 2.0 * scale) {
        width *= 2.0;
      }
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  const QuadRule& r = cached_rule(RuleKind::plain, order);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    const double a = all[i];
    const double h = all[i + 1] - a;
    if (h <= 0.0) {
      continue;
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
      z.push_back(a + h * r.nodes[j]);
      w.push_back(h * r.weights[j]);
    }
  }
}

void graded_panels_both_ends(double len, double scale, int order, std::vector<double>& z, std::vector<double>& w) {
  graded_panels(len, scale, order, true, true, z, w);
}

} // namespace stbem
