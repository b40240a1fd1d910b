#pragma once

#include "stbem/estimator.hpp"

#include <functional>
#include <string>

namespace stbem {

enum class RefineMode { uniform, isotropic, anisotropic, parabolic_uniform, parabolic_adaptive };

/// "uniform", "isotropic", "anisotropic", "parabolic-uniform", "parabolic-adaptive".
RefineMode refine_mode_from_string(const std::string& s);
std::string to_string(RefineMode m);

struct AdaptiveConfig {
  std::string problem = "smooth";
  RefineMode mode = RefineMode::uniform;
  double theta = 0.9;
  std::size_t max_dofs = 2000;
  QuadOrders orders;
  EstimatorOptions estimator;
  bool hh2 = true;
  std::string out_dir = ".";
  int max_levels = 64;
};

struct ConvergenceRecord {
  int level = 0;
  std::size_t n = 0;
  double eta = 0.0;
  double eta_x = 0.0;
  double eta_t = 0.0;
  double zeta = 0.0;
  double zeta_x = 0.0;
  double zeta_t = 0.0;
  double hh2 = 0.0; // NaN when disabled
  double t_assemble = 0.0;
  double t_solve = 0.0;
  double t_estimate = 0.0;
  // Diagnostics, not part of the CSV.
  double t_hh2 = 0.0;
  std::size_t marked_x = 0;
  std::size_t marked_t = 0;
};

enum class MarkMode { joint, isotropic };

struct Marking {
  std::vector<std::size_t> mx;
  std::vector<std::size_t> mt;
};

/// Shortest largest-first prefix of the tagged squared indicators whose sum
/// reaches θ² η². Joint mode ranks η^x and η^t values separately; isotropic
/// mode ranks η^x + η^t per element and marks the same set in both
/// directions. Ties go to the smaller id, then x before t.
Marking mark(const IndicatorSet& ind, double theta, MarkMode mode);

/// Everything a caller may want to see after each level.
struct LevelView {
  const ConvergenceRecord& record;
  const SpaceTimeMesh& mesh;
  const GalerkinSystem& system;
  const Density& density;
  const IndicatorSet& indicators;
  const Marking* marking; // null for uniform modes
};

using LevelObserver = std::function<void(const LevelView&)>;

/// Solve, estimate, mark, refine until the mesh exceeds max_dofs. Uniform
/// runs reuse the (h-h/2) solution as the next level.
std::vector<ConvergenceRecord> run_adaptive(const AdaptiveConfig& config, const LevelObserver& observe = {});

/// Least-squares slope of log q against log N.
double fit_rate(const std::vector<double>& n, const std::vector<double>& q);

enum class Quantity { eta, eta_x, eta_t, zeta, zeta_x, zeta_t, hh2 };
double quantity(const ConvergenceRecord& r, Quantity q);

/// Slope over the last `window` records. Throws with fewer than 2 points.
double fit_rate(const std::vector<ConvergenceRecord>& records, std::size_t window, Quantity q);

} // namespace stbem
