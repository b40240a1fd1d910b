#pragma once

#include "stbem/geometry.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stbem {

/// Data of one benchmark: the indirect method solves V φ = u_D - M0 u0.
struct ProblemSpec {
  std::string name;
  std::shared_ptr<const Domain> domain;
  std::function<double(Point2)> u0;
  /// Dirichlet data as a function of time and arclength.
  std::function<double(double, double)> uD;
  /// Lets the integrators skip the volume potential entirely.
  bool u0_is_zero = false;
  double end_time = 1.0;
};

/// smooth, mild, singular or lshape. Throws std::invalid_argument otherwise.
ProblemSpec problem_catalog(const std::string& name);

const std::vector<std::string>& problem_names();

} // namespace stbem
