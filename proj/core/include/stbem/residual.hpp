#pragma once

#include "stbem/solver.hpp"

namespace stbem {

/// Point evaluation of r = f - VΦ on Σ for one (mesh, Φ) pair.
class ResidualEvaluator {
public:
  ResidualEvaluator(const SpaceTimeMesh& mesh, Eigen::VectorXd phi, ProblemSpec problem, QuadOrders q = {});

  const SpaceTimeMesh& mesh() const { return *mesh_; }
  const ProblemSpec& problem() const { return problem_; }
  const QuadOrders& orders() const { return q_; }

  /// (VΦ)(t, γ(s)).
  double eval_V(double t, double s) const;
  /// u_D(t, s) - (M0 u0)(t, γ(s)); `arc` is the mesh arc containing s. The
  /// volume integral runs in polar coordinates around γ(s) over a fixed
  /// triangulation of the domain, so any triangulation serves for every arc.
  /// Throws std::domain_error for t <= 0.
  double eval_f(double t, double s, const SpaceArc& arc) const;
  double eval_residual(double t, double s, const SpaceArc& arc) const { return eval_f(t, s, arc) - eval_V(t, s); }

private:
  // Elements sharing an arc: VΦ picks up Σ_β w_β 𝔤_{t-β} over the arc, with
  // w_β the net coefficient of slabs ending minus slabs starting at β.
  struct ArcGroup {
    Segment seg;
    std::vector<double> beta;   // ascending
    std::vector<double> weight;
  };

  const SpaceTimeMesh* mesh_;
  ProblemSpec problem_;
  QuadOrders q_;
  std::vector<ArcGroup> groups_;
  std::vector<CurvilinearTriangle> triangles_;
};

} // namespace stbem
