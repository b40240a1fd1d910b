#include "stbem/assembly.hpp"

#include "stbem/parallel.hpp"

#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <unordered_map>

namespace stbem {

namespace {

// Entry geometry: arcs, slab offset a - ã and both slab lengths.
using EntryKey = std::array<double, 7>;

struct EntryKeyHash {
  std::size_t operator()(const EntryKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (double v : k) {
      h ^= std::bit_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

EntryKey entry_key(const PrismElement& p, const PrismElement& pt) {
  return {p.arc.c, p.arc.d, pt.arc.c, pt.arc.d, p.slab.a - pt.slab.a, p.slab.length(), pt.slab.length()};
}

double entry_from_key(const BoundaryCurve& curve, const EntryKey& k, const QuadOrders& q) {
  const double d0 = k[4];
  const double h = k[5];
  const double ht = k[6];
  // b - b̃, b - ã, a - ã, a - b̃
  const CombinedKernel kernel(KernelKind::GG, {{d0 + h - ht, 1.0}, {d0 + h, -1.0}, {d0, 1.0}, {d0 - ht, -1.0}});
  return arc_pair_integral(curve, SpaceArc{k[0], k[1], 0}, SpaceArc{k[2], k[3], 0}, kernel, q);
}

bool is_corner(const BoundaryCurve& curve, double s) {
  for (double c : curve.corner_params()) {
    if (c == s || (c == 0.0 && s == curve.total_length())) {
      return true;
    }
  }
  return false;
}

bool causal_zero(const PrismElement& p, const PrismElement& pt) { return p.slab.b <= pt.slab.a; }

} // namespace

double matrix_entry(const BoundaryCurve& curve, const PrismElement& p, const PrismElement& pt,
                    const QuadOrders& q) {
  if (causal_zero(p, pt)) {
    return 0.0;
  }
  return entry_from_key(curve, entry_key(p, pt), q);
}

Eigen::MatrixXd assemble_matrix(const SpaceTimeMesh& mesh, const QuadOrders& q) {
  const std::size_t n = mesh.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Serial pass: distinct keys in first-seen order, so the result is deterministic.
  std::unordered_map<EntryKey, std::size_t, EntryKeyHash> index;
  std::vector<EntryKey> keys;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!causal_zero(mesh[i], mesh[j])) {
        const EntryKey k = entry_key(mesh[i], mesh[j]);
        if (index.try_emplace(k, keys.size()).second) {
          keys.push_back(k);
        }
      }
    }
  }
  std::vector<double> values(keys.size());
  const BoundaryCurve& curve = mesh.domain().curve();
  parallel_for(keys.size(), [&](std::size_t k) { values[k] = entry_from_key(curve, keys[k], q); });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!causal_zero(mesh[i], mesh[j])) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[index.at(entry_key(mesh[i], mesh[j]))];
      }
    }
  }
  return m;
}

double initial_term(const PrismElement& p, const ProblemSpec& problem, TriangulationCache&,
                    const QuadOrders& q) {
  if (problem.u0_is_zero) {
    return 0.0;
  }
  // ∫_J M0 u0 dt = ∫_Ω (𝔤_a - 𝔤_b)(x - y) u0(y) dy; 𝔤_0 vanishes.
  const CombinedKernel kernel(KernelKind::g, {{p.slab.a, 1.0}, {p.slab.b, -1.0}});
  const double tau_min = p.slab.a > 0.0 ? p.slab.a : p.slab.b;
  const BoundaryCurve& curve = problem.domain->curve();
  const Segment seg = arc_segment(curve, p.arc.c, p.arc.d);
  const auto triangles = seed_triangles(*problem.domain);
  // x ↦ ∫_Ω k(x - y) u0(y) dy varies on the kernel scale only near corners of Γ.
  std::vector<double> z;
  std::vector<double> w;
  graded_panels(seg.len, std::sqrt(4.0 * tau_min), q.plain, is_corner(curve, p.arc.c), is_corner(curve, p.arc.d), z, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Point2 x = seg.at(z[i]);
    double inner = 0.0;
    for (const CurvilinearTriangle& t : triangles) {
      inner += point_triangle_integral(x, t, kernel, problem.u0, q);
    }
    sum += w[i] * inner;
  }
  return sum;
}

double rhs_entry(const PrismElement& p, const ProblemSpec& problem, TriangulationCache& cache,
                 const QuadOrders& q) {
  const QuadRule& r = cached_rule(RuleKind::plain, q.plain);
  const double h = p.slab.length();
  const double len = p.arc.length();
  double dirichlet = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = p.slab.a + h * r.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      inner += r.weights[j] * problem.uD(t, p.arc.c + len * r.nodes[j]);
    }
    dirichlet += r.weights[i] * inner;
  }
  return h * len * dirichlet - initial_term(p, problem, cache, q);
}

Eigen::VectorXd assemble_rhs(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const QuadOrders& q) {
  TriangulationCache cache(*problem.domain);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(mesh.size()));
  parallel_for(mesh.size(),
               [&](std::size_t i) { rhs(static_cast<Eigen::Index>(i)) = rhs_entry(mesh[i], problem, cache, q); });
  return rhs;
}

GalerkinSystem assemble_system(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const QuadOrders& q) {
  const auto start = std::chrono::steady_clock::now();
  GalerkinSystem s;
  s.mesh = &mesh;
  s.matrix = assemble_matrix(mesh, q);
  s.rhs = assemble_rhs(mesh, problem, q);
  s.t_assemble = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

} // namespace stbem
