#pragma once

#include "stbem/geometry.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

namespace stbem {

struct TimeSlab {
  double a = 0.0;
  double b = 1.0;
  int level = 0;

  double length() const { return b - a; }
};

/// Arclength interval [c, d] of Γ. Never crosses a corner, so diam = d - c.
struct SpaceArc {
  double c = 0.0;
  double d = 1.0;
  int level = 0;

  double length() const { return d - c; }
};

struct PrismElement {
  TimeSlab slab;
  SpaceArc arc;
  std::size_t id = 0;

  double measure() const { return slab.length() * arc.length(); }
};

/// Immutable prismatic mesh of [0, T] x Γ. Refinement returns a new mesh
/// whose parent() maps each element to the element of the previous mesh
/// that contains it.
class SpaceTimeMesh {
public:
  SpaceTimeMesh(std::shared_ptr<const Domain> domain, double end_time,
                std::vector<PrismElement> elements, std::vector<std::size_t> parent = {});

  const Domain& domain() const { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
  double end_time() const { return end_time_; }
  std::size_t size() const { return elements_.size(); }
  const PrismElement& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<PrismElement>& elements() const { return elements_; }
  const std::vector<std::size_t>& parent() const { return parent_; }

  /// Sum of |J| |K|; equals T L for a partition.
  double total_measure() const;

  /// Elements P̃ with |J ∩ J̃| > 0 and K ∩ K̃ ≠ ∅, P itself included.
  std::vector<std::size_t> neighbors_x(std::size_t i) const;
  /// Elements P̃ with J ∩ J̃ ≠ ∅ and |K ∩ K̃| > 0, P itself included.
  std::vector<std::size_t> neighbors_t(std::size_t i) const;
  /// Elements sharing a time or space facet of positive length with P.
  std::vector<std::size_t> edge_neighbors(std::size_t i) const;

private:
  void build_index();
  std::vector<std::size_t> arc_candidates(double c, double d) const;

  std::shared_ptr<const Domain> domain_;
  double end_time_;
  std::vector<PrismElement> elements_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> by_c_;
  double max_arc_ = 0.0;
};

SpaceTimeMesh initial_mesh(std::shared_ptr<const Domain> domain, double end_time = 1.0);

SpaceTimeMesh uniform_refine(const SpaceTimeMesh& mesh);

/// Quadrisects the marked elements, then closes so that no element edge
/// carries more than one hanging node.
SpaceTimeMesh refine_isotropic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& marked);

/// Bisects M_x in space and M_t in time, then closes so that elements
/// sharing an edge differ by at most one level in each direction.
SpaceTimeMesh refine_anisotropic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& mark_x,
                                 const std::vector<std::size_t>& mark_t);

enum class ParabolicMode { uniform, adaptive };

/// Refinement keeping h_x^2 / 2 <= h_t <= 2 h_x^2. Uniform mode bisects every
/// element once in space and as often in time (at most three times) as the
/// window allows; adaptive mode quadrisects the marked elements and closes.
/// Throws std::invalid_argument when the input violates the window.
SpaceTimeMesh refine_parabolic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& marked,
                               ParabolicMode mode);

bool in_parabolic_window(const PrismElement& e);

/// Largest level difference between edge-sharing elements, per direction.
struct LevelJumps {
  int time = 0;
  int space = 0;
};
LevelJumps max_level_jumps(const SpaceTimeMesh& mesh);

/// Largest number of hanging nodes found on a single element edge.
int max_hanging_nodes(const SpaceTimeMesh& mesh);

/// Empirical mesh constants: neighbor count in P|_t and local
/// quasi-uniformity ratio of P|_x.
struct MeshConstants {
  int c_nei = 0;
  double c_lqu = 1.0;
};
MeshConstants mesh_constants(const SpaceTimeMesh& mesh);

/// One element per line: `a b c d level_t level_x`, 17 significant digits.
void write_mesh(std::ostream& os, const SpaceTimeMesh& mesh);
SpaceTimeMesh read_mesh(std::istream& is, std::shared_ptr<const Domain> domain, double end_time = 1.0);

} // namespace stbem
