#include "stbem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stbem {

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"smooth", "mild", "singular", "lshape"};
  return names;
}

ProblemSpec problem_catalog(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "smooth") {
    // u = exp(-2π² t) sin(πx) sin(πy), which vanishes on Γ.
    p.domain = std::make_shared<const Domain>(Domain::unit_square());
    p.u0 = [](Point2 x) { return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y); };
    p.uD = [](double, double) { return 0.0; };
  } else if (name == "mild") {
    p.domain = std::make_shared<const Domain>(Domain::unit_square());
    p.u0 = [](Point2) { return 0.0; };
    p.uD = [](double t, double) { return t * t; };
    p.u0_is_zero = true;
  } else if (name == "singular") {
    p.domain = std::make_shared<const Domain>(Domain::unit_square());
    p.u0 = [](Point2) { return 0.0; };
    p.uD = [](double, double) { return 1.0; };
    p.u0_is_zero = true;
  } else if (name == "lshape") {
    p.domain = std::make_shared<const Domain>(Domain::lshape());
    p.u0 = [](Point2) { return 1.0; };
    p.uD = [](double, double) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown problem: " + name);
  }
  return p;
}

} // namespace stbem
