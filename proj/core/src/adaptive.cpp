#include "stbem/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace stbem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Tagged {
  double value;
  std::size_t id;
  int tag; // 0 = x, 1 = t
};

} // namespace

RefineMode refine_mode_from_string(const std::string& s) {
  if (s == "uniform") {
    return RefineMode::uniform;
  }
  if (s == "isotropic") {
    return RefineMode::isotropic;
  }
  if (s == "anisotropic") {
    return RefineMode::anisotropic;
  }
  if (s == "parabolic-uniform") {
    return RefineMode::parabolic_uniform;
  }
  if (s == "parabolic-adaptive") {
    return RefineMode::parabolic_adaptive;
  }
  throw std::invalid_argument("unknown refinement mode: " + s);
}

std::string to_string(RefineMode m) {
  switch (m) {
  case RefineMode::uniform:
    return "uniform";
  case RefineMode::isotropic:
    return "isotropic";
  case RefineMode::anisotropic:
    return "anisotropic";
  case RefineMode::parabolic_uniform:
    return "parabolic-uniform";
  case RefineMode::parabolic_adaptive:
    return "parabolic-adaptive";
  }
  return "?";
}

Marking mark(const IndicatorSet& ind, double theta, MarkMode mode) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("mark: theta must lie in (0, 1]");
  }
  const std::size_t n = ind.eta_x_sq.size();
  std::vector<Tagged> all;
  for (std::size_t i = 0; i < n; ++i) {
    if (mode == MarkMode::joint) {
      all.push_back({ind.eta_x_sq[i], i, 0});
      all.push_back({ind.eta_t_sq[i], i, 1});
    } else {
      all.push_back({ind.eta_x_sq[i] + ind.eta_t_sq[i], i, 0});
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.value != b.value) {
      return a.value > b.value;
    }
    return a.id != b.id ? a.id < b.id : a.tag < b.tag;
  });
  const double target = theta * theta * ind.eta_sq();
  Marking m;
  double sum = 0.0;
  for (const Tagged& e : all) {
    if (sum >= target || e.value <= 0.0) {
      break;
    }
    sum += e.value;
    if (mode == MarkMode::isotropic) {
      m.mx.push_back(e.id);
      m.mt.push_back(e.id);
    } else if (e.tag == 0) {
      m.mx.push_back(e.id);
    } else {
      m.mt.push_back(e.id);
    }
  }
  std::sort(m.mx.begin(), m.mx.end());
  std::sort(m.mt.begin(), m.mt.end());
  return m;
}

std::vector<ConvergenceRecord> run_adaptive(const AdaptiveConfig& config, const LevelObserver& observe) {
  const ProblemSpec problem = problem_catalog(config.problem);
  auto mesh = std::make_shared<const SpaceTimeMesh>(initial_mesh(problem.domain, problem.end_time));
  std::optional<FineLevel> reuse;
  std::vector<ConvergenceRecord> records;
  for (int level = 0; mesh->size() <= config.max_dofs && level < config.max_levels; ++level) {
    ConvergenceRecord rec;
    rec.level = level;
    rec.n = mesh->size();
    GalerkinSystem system;
    Density phi;
    if (reuse) {
      system = std::move(reuse->system);
      phi = std::move(reuse->density);
      rec.t_assemble = system.t_assemble;
      rec.t_solve = reuse->t_solve;
      reuse.reset();
    } else {
      system = assemble_system(*mesh, problem, config.orders);
      rec.t_assemble = system.t_assemble;
      const auto start = std::chrono::steady_clock::now();
      phi = solve_galerkin(system);
      rec.t_solve = seconds_since(start);
    }

    auto start = std::chrono::steady_clock::now();
    const IndicatorSet ind = compute_indicators(*mesh, phi.coefficients, problem, config.orders, config.estimator);
    rec.t_estimate = seconds_since(start);
    rec.eta_x = std::sqrt(ind.eta_x_sum);
    rec.eta_t = std::sqrt(ind.eta_t_sum);
    rec.eta = std::sqrt(ind.eta_sq());
    rec.zeta_x = std::sqrt(ind.zeta_x_sum);
    rec.zeta_t = std::sqrt(ind.zeta_t_sum);
    rec.zeta = std::sqrt(ind.zeta_sq());

    std::shared_ptr<const SpaceTimeMesh> next;
    std::optional<Marking> marking;
    rec.hh2 = std::numeric_limits<double>::quiet_NaN();
    if (config.hh2) {
      start = std::chrono::steady_clock::now();
      HH2Result hh = hh2_estimate(*mesh, problem, phi, config.orders, config.mode == RefineMode::uniform);
      rec.t_hh2 = seconds_since(start);
      rec.hh2 = hh.value;
      if (hh.fine) {
        next = hh.fine->mesh;
        reuse = std::move(hh.fine);
      }
    }

    switch (config.mode) {
    case RefineMode::uniform:
      if (!next) {
        next = std::make_shared<const SpaceTimeMesh>(uniform_refine(*mesh));
      }
      break;
    case RefineMode::isotropic:
      marking = mark(ind, config.theta, MarkMode::isotropic);
      next = std::make_shared<const SpaceTimeMesh>(refine_isotropic(*mesh, marking->mx));
      break;
    case RefineMode::anisotropic:
      marking = mark(ind, config.theta, MarkMode::joint);
      next = std::make_shared<const SpaceTimeMesh>(refine_anisotropic(*mesh, marking->mx, marking->mt));
      break;
    case RefineMode::parabolic_uniform:
      next = std::make_shared<const SpaceTimeMesh>(refine_parabolic(*mesh, {}, ParabolicMode::uniform));
      break;
    case RefineMode::parabolic_adaptive:
      marking = mark(ind, config.theta, MarkMode::isotropic);
      next = std::make_shared<const SpaceTimeMesh>(refine_parabolic(*mesh, marking->mx, ParabolicMode::adaptive));
      break;
    }
    if (marking) {
      rec.marked_x = marking->mx.size();
      rec.marked_t = marking->mt.size();
    }
    records.push_back(rec);
    if (observe) {
      observe(LevelView{rec, *mesh, system, phi, ind, marking ? &*marking : nullptr});
    }
    if (next->size() <= mesh->size()) {
      break; // nothing left to refine
    }
    mesh = next;
  }
  return records;
}

double fit_rate(const std::vector<double>& n, const std::vector<double>& q) {
  if (n.size() != q.size() || n.size() < 2) {
    throw std::invalid_argument("fit_rate: need at least two points");
  }
  const double m = static_cast<double>(n.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sx += std::log(n[i]);
    sy += std::log(q[i]);
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - sx / m;
    sxx += dx * dx;
    sxy += dx * (std::log(q[i]) - sy / m);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_rate: all N are equal");
  }
  return sxy / sxx;
}

double quantity(const ConvergenceRecord& r, Quantity q) {
  switch (q) {
  case Quantity::eta:
    return r.eta;
  case Quantity::eta_x:
    return r.eta_x;
  case Quantity::eta_t:
    return r.eta_t;
  case Quantity::zeta:
    return r.zeta;
  case Quantity::zeta_x:
    return r.zeta_x;
  case Quantity::zeta_t:
    return r.zeta_t;
  case Quantity::hh2:
    return r.hh2;
  }
  return 0.0;
}

double fit_rate(const std::vector<ConvergenceRecord>& records, std::size_t window, Quantity q) {
  const std::size_t k = std::min(window, records.size());
  std::vector<double> n;
  std::vector<double> v;
  for (std::size_t i = records.size() - k; i < records.size(); ++i) {
    n.push_back(static_cast<double>(records[i].n));
    v.push_back(quantity(records[i], q));
  }
  return fit_rate(n, v);
}

} // namespace stbem
