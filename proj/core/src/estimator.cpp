#include "stbem/estimator.hpp"

#include "stbem/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stbem {

namespace {

// Normalized barycentric basis values at x.
void bary_basis(double x, const std::vector<double>& nodes, const std::vector<double>& weights,
                std::vector<double>& out) {
  out.assign(nodes.size(), 0.0);
  double denom = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = x - nodes[i];
    if (d == 0.0) {
      out.assign(nodes.size(), 0.0);
      out[i] = 1.0;
      return;
    }
    out[i] = weights[i] / d;
    denom += out[i];
  }
  for (double& v : out) {
    v /= denom;
  }
}

double bary_eval(double x, const std::vector<double>& nodes, const std::vector<double>& weights,
                 const std::vector<double>& values) {
  double num = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = x - nodes[i];
    if (d == 0.0) {
      return values[i];
    }
    const double c = weights[i] / d;
    num += c * values[i];
    denom += c;
  }
  return num / denom;
}

double sq(double x) { return x * x; }

// Arc K seen from an endpoint it shares with K̃: local parameter ξ in [0, 1]
// measured from the shared point, and the unit direction into K.
struct ArcFromVertex {
  double origin = 0.0; // arclength of the shared point as an endpoint of K
  double sign = 1.0;   // +1 if K starts at the shared point
  double len = 0.0;
  Point2 dir;

  double s(double xi) const { return origin + sign * len * xi; }
};

bool same_param(double x, double y, double total) {
  return x == y || (x == 0.0 && y == total) || (x == total && y == 0.0);
}

std::pair<ArcFromVertex, ArcFromVertex> shared_vertex(const BoundaryCurve& curve, const SpaceArc& k,
                                                      const SpaceArc& kt) {
  const double total = curve.total_length();
  auto make = [&](const SpaceArc& a, bool at_start) {
    const Point2 tan = curve.tangent(curve.side_of(0.5 * (a.c + a.d)));
    return ArcFromVertex{at_start ? a.c : a.d, at_start ? 1.0 : -1.0, a.length(),
                         at_start ? tan : -1.0 * tan};
  };
  if (same_param(k.c, kt.d, total)) {
    return {make(k, true), make(kt, false)};
  }
  if (same_param(k.d, kt.c, total)) {
    return {make(k, false), make(kt, true)};
  }
  throw std::invalid_argument("seminorm_space_cross: arcs do not share an endpoint");
}

// Composite Gauss on geometric panels [2^{-k-1}, 2^{-k}] of [0, 1].
const std::pair<std::vector<double>, std::vector<double>>& geometric_rule() {
  static const auto rule = [] {
    const QuadRule& r = cached_rule(RuleKind::plain, 8);
    std::vector<double> z;
    std::vector<double> w;
    double hi = 1.0;
    for (int k = 0; k < 40; ++k) {
      const double lo = 0.5 * hi;
      for (std::size_t i = 0; i < r.size(); ++i) {
        z.push_back(lo + (hi - lo) * r.nodes[i]);
        w.push_back((hi - lo) * r.weights[i]);
      }
      hi = lo;
    }
    return std::make_pair(z, w);
  }();
  return rule;
}

// ∫∫_{[0,len]^2} |g(x) - g(y)|² / |x - y|^{1+2m}, any 0 < m < 1.
double fractional_seminorm(const std::function<double(double)>& g, double len, double m) {
  const auto& [z, w] = geometric_rule();
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = len * z[i];
    const double gx = g(x);
    double inner = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double d = x * z[j];
      inner += w[j] * sq(gx - g(x - d)) / std::pow(d, 1.0 + 2.0 * m);
    }
    sum += w[i] * x * inner;
  }
  return 2.0 * len * sum;
}

} // namespace

std::function<double(double)> ElementField::at_time(double t) const {
  return [this, t](double s) { return at(t, s); };
}

std::function<double(double)> ElementField::at_space(double s) const {
  return [this, s](double t) { return at(t, s); };
}

InterpolatedField::InterpolatedField(const PrismElement& p, const std::function<double(double, double)>& r, int nt,
                                     int nx)
    : a_(p.slab.a), h_(p.slab.length()), c_(p.arc.c), len_(p.arc.length()) {
  if (nt < 1 || nx < 2) {
    throw std::invalid_argument("InterpolatedField: too few nodes");
  }
  for (int i = 0; i < nt; ++i) {
    const double th = (2.0 * i + 1.0) * std::numbers::pi / (2.0 * nt);
    w_.push_back(0.5 * (1.0 - std::cos(th)));
    wt_.push_back((i % 2 == 0 ? 1.0 : -1.0) * std::sin(th));
  }
  for (int j = 0; j < nx; ++j) {
    z_.push_back(0.5 * (1.0 - std::cos(j * std::numbers::pi / (nx - 1))));
    zt_.push_back((j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == nx - 1) ? 0.5 : 1.0));
  }
  values_.resize(static_cast<std::size_t>(nt * nx));
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nx; ++j) {
      values_[static_cast<std::size_t>(i * nx + j)] = r(a_ + h_ * sq(w_[i]), c_ + len_ * z_[j]);
    }
  }
}

double InterpolatedField::at(double t, double s) const { return at_time(t)(s); }

std::function<double(double)> InterpolatedField::at_time(double t) const {
  std::vector<double> basis;
  bary_basis(std::sqrt(std::clamp((t - a_) / h_, 0.0, 1.0)), w_, wt_, basis);
  std::vector<double> row(z_.size(), 0.0);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    for (std::size_t j = 0; j < z_.size(); ++j) {
      row[j] += basis[i] * values_[i * z_.size() + j];
    }
  }
  return [this, row = std::move(row)](double s) { return bary_eval((s - c_) / len_, z_, zt_, row); };
}

std::function<double(double)> InterpolatedField::at_space(double s) const {
  std::vector<double> basis;
  bary_basis((s - c_) / len_, z_, zt_, basis);
  std::vector<double> col(w_.size(), 0.0);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    for (std::size_t j = 0; j < z_.size(); ++j) {
      col[i] += basis[j] * values_[i * z_.size() + j];
    }
  }
  return [this, col = std::move(col)](double t) {
    return bary_eval(std::sqrt(std::clamp((t - a_) / h_, 0.0, 1.0)), w_, wt_, col);
  };
}

double seminorm_space_self(const std::function<double(double)>& v, double len, const EstimatorOptions& o) {
  const QuadRule& r = cached_rule(RuleKind::plain, o.plain);
  // The arc length cancels between |x - y|² and the Jacobian.
  return duffy_square([&](double x, double y) { return sq(v(len * x) - v(len * y)) / sq(x - y); }, r, r,
                      DuffyMode::diagonal);
}

double seminorm_space_cross(const BoundaryCurve& curve, const SpaceArc& k, const std::function<double(double)>& v,
                            const SpaceArc& kt, const std::function<double(double)>& vt, const EstimatorOptions& o) {
  const auto [p, pt] = shared_vertex(curve, k, kt);
  const double cphi = dot(p.dir, pt.dir);
  const double l1 = p.len;
  const double l2 = pt.len;
  const QuadRule& r = cached_rule(RuleKind::plain, o.plain);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double u = r.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double y = r.nodes[j];
      const double q1 = l1 * l1 + l2 * l2 * y * y - 2.0 * l1 * l2 * y * cphi;
      const double q2 = l1 * l1 * y * y + l2 * l2 - 2.0 * l1 * l2 * y * cphi;
      inner += r.weights[j] * (sq(v(p.s(u)) - vt(pt.s(u * y))) / q1 + sq(v(p.s(u * y)) - vt(pt.s(u))) / q2);
    }
    sum += r.weights[i] * inner / u;
  }
  return 2.0 * l1 * l2 * sum;
}

double seminorm_time_self(const std::function<double(double)>& v, double a, double h, const EstimatorOptions& o) {
  const QuadRule& r = cached_rule(RuleKind::inv_sqrt, o.inv_sqrt);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = r.nodes[i];
    const double vt = v(a + h * t);
    double inner = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double s = r.nodes[j];
      inner += r.weights[j] * sq(vt - v(a + h * t * (1.0 - s))) / s;
    }
    sum += r.weights[i] * inner;
  }
  return 2.0 * std::sqrt(h) * sum;
}

double seminorm_time_cross(const std::function<double(double)>& v, const TimeSlab& j,
                           const std::function<double(double)>& vt, const TimeSlab& jt, const EstimatorOptions& o) {
  if (j.a == jt.b) {
    const double a = j.a;
    const double h = j.length();
    const double ht = jt.length();
    const QuadRule& ru = cached_rule(RuleKind::inv_sqrt, o.inv_sqrt);
    const QuadRule& rv = cached_rule(RuleKind::plain, o.plain);
    double sum = 0.0;
    for (std::size_t i = 0; i < ru.size(); ++i) {
      const double u = ru.nodes[i];
      double inner = 0.0;
      for (std::size_t k = 0; k < rv.size(); ++k) {
        const double y = rv.nodes[k];
        inner += rv.weights[k] * (sq(v(a + h * u) - vt(a - ht * u * y)) / std::pow(h + ht * y, 1.5) +
                                  sq(v(a + h * u * y) - vt(a - ht * u)) / std::pow(h * y + ht, 1.5));
      }
      sum += ru.weights[i] * inner;
    }
    return 2.0 * h * ht * sum;
  }
  if (j.b == jt.a) {
    return seminorm_time_cross(vt, jt, v, j, o);
  }
  throw std::invalid_argument("seminorm_time_cross: slabs are not adjacent");
}

std::pair<double, double> zeta_element(const PrismElement& p, const ElementField& r, const EstimatorOptions& o) {
  const QuadRule& g = cached_rule(RuleKind::plain, o.plain);
  const double h = p.slab.length();
  const double len = p.arc.length();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.nodes[i];
    const auto slice = r.at_time(p.slab.a + h * w * w);
    double inner = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      inner += g.weights[j] * sq(slice(p.arc.c + len * g.nodes[j]));
    }
    sum += g.weights[i] * 2.0 * w * inner;
  }
  const double norm2 = h * len * sum;
  return {norm2 / len, norm2 / std::sqrt(h)};
}

double eta_x_element(const SpaceTimeMesh& mesh, std::size_t i, const FieldSet& fields, const EstimatorOptions& o) {
  const PrismElement& p = mesh[i];
  const BoundaryCurve& curve = mesh.domain().curve();
  const QuadRule& g = cached_rule(RuleKind::plain, o.plain);
  double total = 0.0;
  for (std::size_t j : mesh.neighbors_x(i)) {
    const PrismElement& pt = mesh[j];
    const double alpha = std::max(p.slab.a, pt.slab.a);
    const double beta = std::min(p.slab.b, pt.slab.b);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double w = g.nodes[k];
      const double t = alpha + (beta - alpha) * w * w;
      const auto v = fields[i]->at_time(t);
      auto local = [&](double s) { return v(p.arc.c + s); };
      double val = seminorm_space_self(local, p.arc.length(), o);
      if (j != i) {
        const auto vt = fields[j]->at_time(t);
        auto local_t = [&](double s) { return vt(pt.arc.c + s); };
        val += seminorm_space_cross(curve, p.arc, v, pt.arc, vt, o) +
               seminorm_space_self(local_t, pt.arc.length(), o);
      }
      sum += g.weights[k] * 2.0 * w * val;
    }
    total += (beta - alpha) * sum;
  }
  return total;
}

double eta_t_element(const SpaceTimeMesh& mesh, std::size_t i, const FieldSet& fields, const EstimatorOptions& o) {
  const PrismElement& p = mesh[i];
  const QuadRule& g = cached_rule(RuleKind::plain, o.plain);
  double total = 0.0;
  for (std::size_t j : mesh.neighbors_t(i)) {
    const PrismElement& pt = mesh[j];
    const double lo = std::max(p.arc.c, pt.arc.c);
    const double hi = std::min(p.arc.d, pt.arc.d);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = lo + (hi - lo) * g.nodes[k];
      const auto v = fields[i]->at_space(s);
      double val = seminorm_time_self(v, p.slab.a, p.slab.length(), o);
      if (j != i) {
        const auto vt = fields[j]->at_space(s);
        val += seminorm_time_cross(v, p.slab, vt, pt.slab, o) + seminorm_time_self(vt, pt.slab.a, pt.slab.length(), o);
      }
      sum += g.weights[k] * val;
    }
    total += (hi - lo) * sum;
  }
  return total;
}

FieldSet build_fields(const ResidualEvaluator& r, const EstimatorOptions& o) {
  const SpaceTimeMesh& mesh = r.mesh();
  FieldSet fields(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t i) {
    const SpaceArc arc = mesh[i].arc;
    auto eval = [&r, arc](double t, double s) { return r.eval_residual(t, s, arc); };
    if (o.interpolate) {
      fields[i] = std::make_shared<InterpolatedField>(mesh[i], eval, o.field_nt, o.field_nx);
    } else {
      fields[i] = std::make_shared<DirectField>(eval);
    }
  });
  return fields;
}

double compensated_sum(const std::vector<double>& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

IndicatorSet indicators_from_fields(const SpaceTimeMesh& mesh, const FieldSet& fields, const EstimatorOptions& o) {
  const std::size_t n = mesh.size();
  IndicatorSet out;
  out.eta_x_sq.resize(n);
  out.eta_t_sq.resize(n);
  out.zeta_x_sq.resize(n);
  out.zeta_t_sq.resize(n);
  parallel_for(n, [&](std::size_t i) {
    out.eta_x_sq[i] = eta_x_element(mesh, i, fields, o);
    out.eta_t_sq[i] = eta_t_element(mesh, i, fields, o);
    std::tie(out.zeta_x_sq[i], out.zeta_t_sq[i]) = zeta_element(mesh[i], *fields[i], o);
  });
  out.eta_x_sum = compensated_sum(out.eta_x_sq);
  out.eta_t_sum = compensated_sum(out.eta_t_sq);
  out.zeta_x_sum = compensated_sum(out.zeta_x_sq);
  out.zeta_t_sum = compensated_sum(out.zeta_t_sq);
  return out;
}

IndicatorSet compute_indicators(const SpaceTimeMesh& mesh, const Eigen::VectorXd& phi, const ProblemSpec& problem,
                                const QuadOrders& q, const EstimatorOptions& o) {
  const ResidualEvaluator r(mesh, phi, problem, q);
  return indicators_from_fields(mesh, build_fields(r, o), o);
}

PoincareSides poincare_check(double h, double len, const std::function<double(double, double)>& v, double mu,
                             double nu) {
  const QuadRule& g = cached_rule(RuleKind::plain, 16);
  PoincareSides out;
  double l2 = 0.0;
  double space = 0.0;
  double time = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = h * g.nodes[i];
    const double s = len * g.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      inner += g.weights[j] * sq(v(t, len * g.nodes[j]));
    }
    l2 += g.weights[i] * inner;
    space += g.weights[i] * fractional_seminorm([&](double x) { return v(t, x); }, len, mu);
    time += g.weights[i] * fractional_seminorm([&](double x) { return v(x, s); }, h, nu);
  }
  out.lhs = h * len * l2;
  out.rhs = std::pow(len, 2.0 * mu) * h * space + std::pow(h, 2.0 * nu) * len * time;
  return out;
}

} // namespace stbem
