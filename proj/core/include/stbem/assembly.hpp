#pragma once

#include "stbem/integrators.hpp"
#include "stbem/mesh.hpp"
#include "stbem/problems.hpp"

#include <Eigen/Dense>

namespace stbem {

struct GalerkinSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  const SpaceTimeMesh* mesh = nullptr;
  double t_assemble = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(rhs.size()); }
};

/// ⟨V 1_{P̃}, 1_P⟩ for test element P and trial element P̃: the four-term
/// 𝔊 combination integrated over K x K̃. Exactly 0 when sup J <= inf J̃.
double matrix_entry(const BoundaryCurve& curve, const PrismElement& p, const PrismElement& pt,
                    const QuadOrders& q = {});

/// Dense matrix, rows by test element and columns by trial element.
/// Entries sharing geometry and time offsets are computed once.
Eigen::MatrixXd assemble_matrix(const SpaceTimeMesh& mesh, const QuadOrders& q = {});

/// ⟨u_D, 1_P⟩ - ⟨M0 u0, 1_P⟩.
double rhs_entry(const PrismElement& p, const ProblemSpec& problem, TriangulationCache& cache,
                 const QuadOrders& q = {});

/// ⟨M0 u0, 1_P⟩ alone.
double initial_term(const PrismElement& p, const ProblemSpec& problem, TriangulationCache& cache,
                    const QuadOrders& q = {});

Eigen::VectorXd assemble_rhs(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const QuadOrders& q = {});

GalerkinSystem assemble_system(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const QuadOrders& q = {});

} // namespace stbem
