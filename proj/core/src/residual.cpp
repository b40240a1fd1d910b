#include "stbem/residual.hpp"

#include <map>
#include <stdexcept>

namespace stbem {

ResidualEvaluator::ResidualEvaluator(const SpaceTimeMesh& mesh, Eigen::VectorXd phi, ProblemSpec problem,
                                     QuadOrders q)
    : mesh_(&mesh), problem_(std::move(problem)), q_(q), triangles_(seed_triangles(mesh.domain())) {
  if (static_cast<std::size_t>(phi.size()) != mesh.size()) {
    throw std::invalid_argument("ResidualEvaluator: density does not match the mesh");
  }
  std::map<std::pair<double, double>, std::map<double, double>> by_arc;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double c = phi(static_cast<Eigen::Index>(i));
    if (c == 0.0) {
      continue;
    }
    auto& w = by_arc[{mesh[i].arc.c, mesh[i].arc.d}];
    w[mesh[i].slab.b] += c;
    w[mesh[i].slab.a] -= c;
  }
  const BoundaryCurve& curve = mesh.domain().curve();
  for (const auto& [arc, w] : by_arc) {
    ArcGroup g{arc_segment(curve, arc.first, arc.second), {}, {}};
    for (const auto& [beta, weight] : w) {
      if (weight != 0.0) {
        g.beta.push_back(beta);
        g.weight.push_back(weight);
      }
    }
    if (!g.beta.empty()) {
      groups_.push_back(std::move(g));
    }
  }
}

double ResidualEvaluator::eval_V(double t, double s) const {
  const Point2 x = mesh_->domain().curve().gamma(s);
  std::vector<KernelTerm> terms;
  double sum = 0.0;
  for (const ArcGroup& g : groups_) {
    if (g.beta.front() >= t) {
      continue;
    }
    // The largest tau decides whether the arc is within reach at all.
    const double tau_max = t - g.beta.front();
    if (point_segment_dist2(x, g.seg.p0, g.seg.p1()) >= cutoff_r2(tau_max)) {
      continue;
    }
    terms.clear();
    for (std::size_t k = 0; k < g.beta.size() && g.beta[k] < t; ++k) {
      terms.push_back({t - g.beta[k], g.weight[k]});
    }
    sum += point_segment_integral(x, g.seg, CombinedKernel(KernelKind::g, terms), q_);
  }
  return sum;
}

double ResidualEvaluator::eval_f(double t, double s, const SpaceArc&) const {
  if (!(t > 0.0)) {
    throw std::domain_error("eval_f: t must be positive");
  }
  double value = problem_.uD(t, s);
  if (problem_.u0_is_zero) {
    return value;
  }
  const Point2 x = mesh_->domain().curve().gamma(s);
  const CombinedKernel heat(KernelKind::heat, {{t, 1.0}});
  for (const CurvilinearTriangle& tr : triangles_) {
    value -= point_triangle_integral(x, tr, heat, problem_.u0, q_);
  }
  return value;
}

} // namespace stbem
