#include "stbem/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace stbem {

namespace {

// Legendre P_k(xi) and P_k'(xi) for k = 0..n.
void legendre_all(int n, double xi, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(n + 1, 0.0);
  dp.assign(n + 1, 0.0);
  p[0] = 1.0;
  if (n == 0) {
    return;
  }
  p[1] = xi;
  dp[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * xi * p[k] - k * p[k - 1]) / (k + 1.0);
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
}

// The moment system is solved in extended precision: its Jacobian is
// ill-conditioned enough that double precision stalls near 1e-11.
using Real = long double;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

void legendre_all_ext(int n, Real xi, std::vector<Real>& p, std::vector<Real>& dp) {
  p.assign(n + 1, 0.0L);
  dp.assign(n + 1, 0.0L);
  p[0] = 1.0L;
  if (n == 0) {
    return;
  }
  p[1] = xi;
  dp[1] = 1.0L;
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2.0L * k + 1.0L) * xi * p[k] - k * p[k - 1]) / (k + 1.0L);
    dp[k + 1] = dp[k - 1] + (2.0L * k + 1.0L) * p[k];
  }
}

// ∫_0^1 P̃_k(x) log x dx for the shifted Legendre polynomial P̃_k.
Real log_moment(int k) {
  if (k == 0) {
    return -1.0L;
  }
  const Real sign = (k % 2 == 1) ? 1.0L : -1.0L;
  return sign / (static_cast<Real>(k) * (k + 1));
}

// ∫_0^1 P̃_k(x) (x^a - 1)/a dx; the a -> 0 limit is log_moment.
Real power_moment(int k, Real a) {
  if (a == 0.0L) {
    return log_moment(k);
  }
  if (k == 0) {
    return -1.0L / (a + 1.0L);
  }
  Real m = 1.0L / ((a + 1.0L) * (a + 2.0L));
  for (int j = 2; j <= k; ++j) {
    m *= (a - j + 1.0L) / (a + j + 1.0L);
  }
  return m;
}

// Moment equations for {P̃_k} and {P̃_k (x^a - 1)/a}, k < n. The second
// family spans the same space as {x^(k+a)}; the system is Chebyshev for
// a in [0, 1), and a = 0 is the log case.
struct MuntzSystem {
  int n;
  Real a;

  void evaluate(const VecR& v, VecR& res, MatR* jac) const {
    const int m = 2 * n;
    res.setZero(m);
    if (jac != nullptr) {
      jac->setZero(m, m);
    }
    std::vector<Real> p;
    std::vector<Real> dp;
    for (int i = 0; i < n; ++i) {
      const Real x = v[i];
      const Real w = v[n + i];
      legendre_all_ext(n, 2.0L * x - 1.0L, p, dp);
      const Real lg = std::log(x);
      const Real g = a == 0.0L ? lg : std::expm1(a * lg) / a;
      const Real dg = a == 0.0L ? 1.0L / x : std::exp((a - 1.0L) * lg);
      for (int k = 0; k < n; ++k) {
        const Real pk = p[k];
        const Real dpk = 2.0L * dp[k];
        res[k] += w * pk;
        res[n + k] += w * pk * g;
        if (jac != nullptr) {
          (*jac)(k, i) = w * dpk;
          (*jac)(k, n + i) = pk;
          (*jac)(n + k, i) = w * (dpk * g + pk * dg);
          (*jac)(n + k, n + i) = pk * g;
        }
      }
    }
    res[0] -= 1.0L;
    for (int k = 0; k < n; ++k) {
      res[n + k] -= power_moment(k, a);
    }
  }
};

bool admissible(const VecR& v, int n) {
  for (int i = 0; i < n; ++i) {
    if (!(v[i] > 0.0L && v[i] < 1.0L) || !(v[n + i] > 0.0L)) {
      return false;
    }
    if (i > 0 && !(v[i] > v[i - 1])) {
      return false;
    }
  }
  return true;
}

// Damped Newton at fixed a; returns false when it stalls.
bool newton(const MuntzSystem& sys, VecR& v, Real tol) {
  const int m = 2 * sys.n;
  VecR res(m);
  MatR jac(m, m);
  sys.evaluate(v, res, &jac);
  Real rnorm = res.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 60; ++it) {
    if (rnorm <= tol) {
      return true;
    }
    // Column equilibration: node and weight columns differ by orders of magnitude.
    VecR scale = jac.colwise().norm().transpose();
    for (int j = 0; j < m; ++j) {
      scale[j] = scale[j] > 0.0L ? 1.0L / scale[j] : 1.0L;
    }
    const MatR js = jac * scale.asDiagonal();
    const VecR step = scale.asDiagonal() * js.fullPivLu().solve(res);
    Real damp = 1.0L;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      VecR trial = v - damp * step;
      if (admissible(trial, sys.n)) {
        VecR tres(m);
        sys.evaluate(trial, tres, nullptr);
        const Real tnorm = tres.lpNorm<Eigen::Infinity>();
        if (tnorm < rnorm || tnorm <= tol) {
          v = trial;
          rnorm = tnorm;
          accepted = true;
          break;
        }
      }
      damp *= 0.5L;
    }
    if (!accepted) {
      // Near the solution the line search criterion is too strict for this
      // badly scaled system; take a few undamped steps and keep the best.
      VecR best = v;
      Real best_norm = rnorm;
      VecR cur = v;
      VecR s = step;
      for (int k = 0; k < 4; ++k) {
        cur -= s;
        if (!admissible(cur, sys.n)) {
          break;
        }
        sys.evaluate(cur, res, &jac);
        const Real cn = res.lpNorm<Eigen::Infinity>();
        if (cn < best_norm) {
          best = cur;
          best_norm = cn;
        }
        VecR sc = jac.colwise().norm().transpose();
        for (int j = 0; j < m; ++j) {
          sc[j] = sc[j] > 0.0L ? 1.0L / sc[j] : 1.0L;
        }
        s = sc.asDiagonal() * (jac * sc.asDiagonal()).fullPivLu().solve(res);
      }
      v = best;
      return best_norm <= 10.0L * tol;
    }
    sys.evaluate(v, res, &jac);
  }
  return rnorm <= tol;
}

// n-point Gauss rule for ∫_0^1 g(u) u du (Golub–Welsch, Jacobi weight (1+ξ)).
void gauss_u_weight(int n, std::vector<double>& u, std::vector<double>& w) {
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  const double b = 1.0;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + b;
    jm(k, k) = (b * b) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double kk = k + 1.0;
      const double t = 2.0 * kk + b;
      const double beta = 4.0 * kk * kk * (kk + b) * (kk + b) / (t * t * (t + 1.0) * (t - 1.0));
      jm(k, k + 1) = jm(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  u.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xi = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    u[i] = 0.5 * (1.0 + xi);
    // ∫_{-1}^{1} (1 + ξ) dξ = 2, and ∫_0^1 g(u) u du = (1/4) ∫ g (1+ξ) dξ.
    w[i] = 0.25 * 2.0 * v0 * v0;
  }
}

QuadRule gauss_log_newton(int n) {
  // At a = 1/2 the system is {x^(j/2)}, j < 2n; x = u^2 turns it into
  // Gauss–Jacobi for the weight 2u.
  std::vector<double> u;
  std::vector<double> wu;
  gauss_u_weight(n, u, wu);
  VecR v(2 * n);
  for (int i = 0; i < n; ++i) {
    v[i] = static_cast<Real>(u[i]) * u[i];
    v[n + i] = 2.0L * wu[i];
  }
  const Real tol = 1e-14L;
  Real a = 0.5L;
  if (!newton({n, a}, v, 1e-13L)) {
    throw std::runtime_error("gauss_log: start rule failed");
  }
  Real da = 1.0L / 16.0L;
  for (int steps = 0; a > 0.0L; ++steps) {
    if (steps > 400) {
      throw std::runtime_error("gauss_log: continuation stalled");
    }
    const Real next = std::max(0.0L, a - da);
    VecR trial = v;
    if (newton({n, next}, trial, next > 0.0L ? 1e-11L : tol)) {
      v = trial;
      a = next;
      da = std::min(0.125L, 1.5L * da);
    } else {
      da *= 0.5L;
      if (da < 1e-7L) {
        throw std::runtime_error("gauss_log: continuation stalled");
      }
    }
  }
  QuadRule r;
  r.kind = RuleKind::log;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(static_cast<double>(v[i]));
    r.weights.push_back(static_cast<double>(v[n + i]));
  }
  return r;
}

} // namespace

QuadRule gauss_legendre(int n) {
  if (n < 1 || n > 64) {
    throw std::invalid_argument("gauss_legendre: n must be in [1, 64]");
  }
  QuadRule r;
  r.kind = RuleKind::plain;
  r.nodes.resize(n);
  r.weights.resize(n);
  std::vector<double> p;
  std::vector<double> dp;
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      legendre_all(n, xi, p, dp);
      const double dx = p[n] / dp[n];
      xi -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    legendre_all(n, xi, p, dp);
    // Ascending nodes on [0, 1].
    r.nodes[i] = 0.5 * (1.0 - xi);
    r.weights[i] = 1.0 / ((1.0 - xi * xi) * dp[n] * dp[n]);
  }
  return r;
}

QuadRule graded_log_fallback(int n, int depth) {
  const QuadRule gl = gauss_legendre(n);
  QuadRule r;
  r.kind = RuleKind::log;
  double hi = 1.0;
  std::vector<std::pair<double, double>> panels;
  for (int j = 0; j < depth; ++j) {
    panels.emplace_back(0.25 * hi, hi);
    hi *= 0.25;
  }
  panels.emplace_back(0.0, hi);
  std::reverse(panels.begin(), panels.end());
  for (const auto& [a, b] : panels) {
    for (std::size_t i = 0; i < gl.size(); ++i) {
      r.nodes.push_back(a + (b - a) * gl.nodes[i]);
      r.weights.push_back((b - a) * gl.weights[i]);
    }
  }
  return r;
}

QuadRule gauss_log(int n) {
  if (n < 2 || n > 32) {
    throw std::invalid_argument("gauss_log: n must be in [2, 32]");
  }
  try {
    return gauss_log_newton(n);
  } catch (const std::runtime_error&) {
    return graded_log_fallback(n, 20);
  }
}

QuadRule gauss_inv_sqrt(int n) {
  QuadRule r = gauss_legendre(n);
  r.kind = RuleKind::inv_sqrt;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.nodes[i] = r.nodes[i] * r.nodes[i];
    r.weights[i] *= 2.0;
  }
  return r;
}

const QuadRule& cached_rule(RuleKind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{static_cast<int>(kind), n}];
  if (!slot) {
    switch (kind) {
    case RuleKind::plain:
      slot = std::make_unique<QuadRule>(gauss_legendre(n));
      break;
    case RuleKind::log:
      slot = std::make_unique<QuadRule>(gauss_log(n));
      break;
    case RuleKind::inv_sqrt:
      slot = std::make_unique<QuadRule>(gauss_inv_sqrt(n));
      break;
    }
  }
  return *slot;
}

} // namespace stbem
