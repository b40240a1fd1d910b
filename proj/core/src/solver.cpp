#include "stbem/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace stbem {

Density solve_galerkin(const GalerkinSystem& system) {
  Density d;
  d.mesh = system.mesh;
  const double rhs_norm = system.rhs.lpNorm<Eigen::Infinity>();
  if (rhs_norm == 0.0) {
    d.coefficients = Eigen::VectorXd::Zero(system.rhs.size());
    return d;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  d.coefficients = lu.solve(system.rhs);
  const double res = (system.matrix * d.coefficients - system.rhs).lpNorm<Eigen::Infinity>();
  const double scale = system.matrix.cwiseAbs().rowwise().sum().maxCoeff() * d.coefficients.lpNorm<Eigen::Infinity>() +
                       rhs_norm;
  if (!std::isfinite(res) || res > 1e-10 * scale) {
    throw std::runtime_error("solve_galerkin: matrix is singular to working precision");
  }
  return d;
}

Eigen::VectorXd prolong(const SpaceTimeMesh& fine, const Eigen::VectorXd& coarse) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(fine.size()));
  for (std::size_t i = 0; i < fine.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = coarse(static_cast<Eigen::Index>(fine.parent().at(i)));
  }
  return out;
}

double energy_norm(const Eigen::MatrixXd& v, const Eigen::VectorXd& e) {
  return std::sqrt(std::max(0.0, e.dot(v * e)));
}

HH2Result hh2_estimate(const SpaceTimeMesh& mesh, const ProblemSpec& problem, const Density& phi,
                       const QuadOrders& q, bool keep_fine) {
  FineLevel f{std::make_shared<const SpaceTimeMesh>(uniform_refine(mesh)), {}, {}, 0.0};
  f.system = assemble_system(*f.mesh, problem, q);
  const auto start = std::chrono::steady_clock::now();
  f.density = solve_galerkin(f.system);
  f.t_solve = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Eigen::VectorXd e = f.density.coefficients - prolong(*f.mesh, phi.coefficients);
  HH2Result out;
  out.value = energy_norm(f.system.matrix, e);
  if (keep_fine) {
    out.fine = std::move(f);
  }
  return out;
}

} // namespace stbem
