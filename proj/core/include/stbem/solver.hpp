#pragma once

#include "stbem/assembly.hpp"

#include <memory>
#include <optional>

namespace stbem {

/// Piecewise constant density: one value per element of its mesh.
struct Density {
  const SpaceTimeMesh* mesh = nullptr;
  Eigen::VectorXd coefficients;
};

/// Dense LU with partial pivoting. Throws std::runtime_error when the
/// recomputed residual exceeds 1e-10 relative to ‖V‖‖c‖ + ‖rhs‖.
Density solve_galerkin(const GalerkinSystem& system);

/// Each child inherits the coefficient of its parent.
Eigen::VectorXd prolong(const SpaceTimeMesh& fine, const Eigen::VectorXd& coarse);

/// Solution on the uniformly refined mesh, kept so that a uniform run can
/// reuse it as its next level.
struct FineLevel {
  std::shared_ptr<const SpaceTimeMesh> mesh;
  GalerkinSystem system;
  Density density;
  double t_solve = 0.0;
};

struct HH2Result {
  double value = 0.0;
  std::optional<FineLevel> fine;
};

/// ‖Φ̂ - Φ‖_V with Φ̂ the Galerkin solution after one uniform refinement:
/// sqrt(eᵀ V̂ e), e = Φ̂ - prolong(Φ).
HH2Result hh2_estimate(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const Density& phi,
                       const QuadOrders& q = {}, bool keep_fine = false);

/// sqrt(eᵀ V e), clamped at 0 against roundoff.
double energy_norm(const Eigen::MatrixXd& v, const Eigen::VectorXd& e);

} // namespace stbem
