#include "oracle.hpp"

#include "stbem/residual.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace stbem;

namespace {

ProblemSpec ones_on_square() {
  ProblemSpec p;
  p.name = "ones";
  p.domain = std::make_shared<const Domain>(Domain::unit_square());
  p.u0 = [](Point2) { return 1.0; };
  p.uD = [](double, double) { return 0.0; };
  return p;
}

double heat_1d(double t, double d) { return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t); }

/// ∫_0^1 g1(t, x - y) sin(π y) dy, panels refined around y = x.
double sine_factor(double t, double x) {
  auto f = [&](double y) { return heat_1d(t, x - y) * std::sin(std::numbers::pi * y); };
  const double w = std::min(0.5, 10.0 * std::sqrt(t));
  double s = 0.0;
  std::vector<double> cuts = {0.0, std::max(0.0, x - w), x, std::min(1.0, x + w), 1.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      const double lo = cuts[i];
      const double hi = cuts[i + 1];
      for (int k = 0; k < 16; ++k) {
        s += oracle::gauss(f, lo + (hi - lo) * k / 16.0, lo + (hi - lo) * (k + 1) / 16.0);
      }
    }
  }
  return s;
}

/// Composite rule on [0, 1] graded geometrically (ratio 1/4) toward 0, or
/// toward both ends.
void graded_rule(bool both, std::vector<double>& z, std::vector<double>& w) {
  std::vector<double> cuts;
  double x = both ? 0.5 : 1.0;
  for (int k = 0; k < 8; ++k) {
    cuts.push_back(x);
    x *= 0.25;
  }
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  if (both) {
    for (int i = static_cast<int>(cuts.size()) - 2; i >= 0; --i) {
      cuts.push_back(1.0 - cuts[i]);
    }
  }
  const auto [gx, gw] = oracle::legendre(10);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double h = cuts[i + 1] - cuts[i];
    for (std::size_t j = 0; j < gx.size(); ++j) {
      z.push_back(cuts[i] + h * 0.5 * (gx[j] + 1.0));
      w.push_back(h * 0.5 * gw[j]);
    }
  }
}

} // namespace

TEST(Residual, ZeroDensity) {
  const ProblemSpec p = problem_catalog("singular");
  const auto m = initial_mesh(p.domain);
  const ResidualEvaluator r(m, Eigen::VectorXd::Zero(4), p);
  for (double t : {0.01, 0.5, 1.0}) {
    EXPECT_EQ(r.eval_V(t, 0.3), 0.0);
    EXPECT_EQ(r.eval_f(t, 0.3, m[0].arc), 1.0);
    EXPECT_EQ(r.eval_residual(t, 2.7, m[2].arc), 1.0);
  }
  EXPECT_THROW(r.eval_f(0.0, 0.3, m[0].arc), std::domain_error);
}

TEST(Residual, FarPointMatchesTensorQuadrature) {
  // Density 1 on [0,1] x bottom edge, evaluated on the top edge.
  const ProblemSpec p = problem_catalog("singular");
  const auto m = initial_mesh(p.domain);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(4);
  phi(0) = 1.0;
  const ResidualEvaluator r(m, phi, p);
  for (double t : {0.1, 0.6, 1.0}) {
    for (double s : {2.2, 2.5, 2.9}) {
      const Point2 x = p.domain->curve().gamma(s);
      const double ref = oracle::gauss_geometric_left(
          [&](double tau) {
            return oracle::gauss([&](double y) { return heat_G_r2(tau, norm2(x - Point2{y, 0.0})); }, 0.0, 1.0);
          },
          0.0, t, 30);
      EXPECT_NEAR(r.eval_V(t, s), ref, 1e-10 * ref) << t << " " << s;
    }
  }
}

TEST(Residual, LaterSlabsDoNotContribute) {
  const ProblemSpec p = problem_catalog("singular");
  const auto m = uniform_refine(initial_mesh(p.domain));
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].slab.a >= 0.5) {
      phi(static_cast<Eigen::Index>(i)) = 1.0;
    }
  }
  const ResidualEvaluator r(m, phi, p);
  EXPECT_EQ(r.eval_V(0.3, 0.25), 0.0);
  EXPECT_EQ(r.eval_V(0.5, 1.7), 0.0);
  EXPECT_GT(r.eval_V(0.6, 1.7), 0.0);
}

TEST(Residual, InitialTermOfSmoothProblem) {
  // M0 u0 factorizes into one-dimensional heat convolutions of sin(π y).
  const ProblemSpec p = problem_catalog("smooth");
  const auto m = initial_mesh(p.domain);
  const ResidualEvaluator r(m, Eigen::VectorXd::Zero(4), p);
  for (double t : {0.002, 0.05, 0.5}) {
    for (double s : {0.5, 0.1, 1.8}) {
      const Point2 x = p.domain->curve().gamma(s);
      const double ref = sine_factor(t, x.x) * sine_factor(t, x.y);
      const double got = -r.eval_f(t, s, m[static_cast<std::size_t>(s)].arc);
      EXPECT_NEAR(got, ref, 1e-8 * std::max(1e-3, std::abs(ref))) << t << " " << s;
    }
  }
}

TEST(Residual, InitialTermDecaysInTime) {
  ProblemSpec p = ones_on_square();
  p.end_time = 10.0;
  const auto m = initial_mesh(p.domain, p.end_time);
  const ResidualEvaluator r(m, Eigen::VectorXd::Zero(4), p);
  for (double s : {0.5, 1.25, 3.9}) {
    const auto& arc = m[static_cast<std::size_t>(s)].arc;
    const double early = std::abs(r.eval_f(0.1, s, arc));
    const double late = std::abs(r.eval_f(5.0, s, arc));
    EXPECT_GT(early, 0.0);
    EXPECT_LT(late, early);
  }
}

TEST(Residual, GalerkinOrthogonalityOnInitialMeshes) {
  std::vector<double> zt;
  std::vector<double> wt;
  std::vector<double> zx;
  std::vector<double> wx;
  graded_rule(false, zt, wt);
  graded_rule(true, zx, wx);
  for (const char* name : {"smooth", "singular"}) { // all four run in the acceptance suite
    const ProblemSpec p = problem_catalog(name);
    const auto m = initial_mesh(p.domain);
    const Density d = solve_galerkin(assemble_system(m, p));
    const ResidualEvaluator r(m, d.coefficients, p);
    std::vector<double> integral(m.size(), 0.0);
    double fmax = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& e = m[i];
      // t = a + h w², which absorbs the square-root behaviour at the slab start.
      for (std::size_t a = 0; a < zt.size(); ++a) {
        const double t = e.slab.a + e.slab.length() * zt[a] * zt[a];
        for (std::size_t b = 0; b < zx.size(); ++b) {
          const double s = e.arc.c + e.arc.length() * zx[b];
          const double f = r.eval_f(t, s, e.arc);
          fmax = std::max(fmax, std::abs(f));
          integral[i] += wt[a] * wx[b] * 2.0 * zt[a] * (f - r.eval_V(t, s));
        }
      }
      integral[i] *= e.measure();
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_LE(std::abs(integral[i]), 1e-7 * fmax * m[i].measure()) << name << " element " << i;
    }
  }
}

TEST(Residual, ContinuousAcrossSlabBoundary) {
  const ProblemSpec p = problem_catalog("mild");
  const auto m = uniform_refine(initial_mesh(p.domain));
  const Density d = solve_galerkin(assemble_system(m, p));
  const ResidualEvaluator r(m, d.coefficients, p);
  const double s = 0.3;
  const auto& arc = m[0].arc.c <= s && s <= m[0].arc.d ? m[0].arc : m[1].arc;
  double previous = 1.0;
  for (double delta : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double jump = std::abs(r.eval_residual(0.5 + delta, s, arc) - r.eval_residual(0.5 - delta, s, arc));
    EXPECT_LT(jump, previous);
    previous = jump;
  }
  EXPECT_LT(previous, 1e-3);
}
