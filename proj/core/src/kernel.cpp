#include "stbem/kernel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stbem {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kInvFourPi = 0.25 * std::numbers::inv_pi;
// Below this the power series is used; above it the alternating series
// starts losing digits to cancellation.
constexpr double kSeriesLimit = 1.0;
constexpr double kUnderflow = 700.0;
// Above this 1 - (1+u) e^u E1(u) ~ -1/u^2 cancels too much to form directly.
constexpr double kGGDirectLimit = 2.0;

// Ei(x) = γ + log(-x) + Σ_{k>=1} x^k / (k k!); for |x| <= 1 the sum is
// truncated after degree 18 (remainder below 5e-19).
struct SeriesCoefficients {
  std::array<double, 19> c{};
  SeriesCoefficients() {
    double fact = 1.0;
    for (int k = 1; k < 19; ++k) {
      fact *= k;
      c[k] = 1.0 / (k * fact);
    }
  }
};

double ei_series(double x) {
  static const SeriesCoefficients s;
  double sum = 0.0;
  for (int k = 18; k >= 1; --k) {
    sum = (sum + s.c[k]) * x;
  }
  return kEulerGamma + std::log(-x) + sum;
}

} // namespace

namespace {

// Modified Lentz evaluation of the continued fraction
// E1(u) e^u = 1/(u+1- 1/(u+3- 4/(u+5- ...))).
template <class Real>
Real e1_scaled_cf(Real u) {
  const Real tiny = 1e-300;
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real b = u + 1;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (int i = 1; i < 2000; ++i) {
    const Real an = -static_cast<Real>(i) * i;
    b += 2;
    d = 1 / (an * d + b);
    c = b + an / c;
    const Real del = c * d;
    h *= del;
    if (std::abs(del - 1) < eps) {
      break;
    }
  }
  return h;
}

// 1 - (1+u) e^u E1(u) without cancellation. With e^u E1(u) = 1/(u+1-c) and
// c = 1/(u+3- 4/(u+5- 9/(u+7- ...))) the difference is -c/(u+1-c).
double gg_factor_cf(double u) {
  const double tiny = 1e-300;
  const double eps = std::numeric_limits<double>::epsilon();
  double b = u + 3.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 2; i < 2000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps) {
      break;
    }
  }
  return -h / (u + 1.0 - h);
}

// Chebyshev expansions of e^u E1(u) on [2^k, 2^{k+1}], k = 0..6. The nearest
// singularity (u = 0) lies three half-widths from each interval, so the
// coefficients decay like 5.8^{-n}.
constexpr int kChebDegree = 26;
constexpr int kChebFirst = 0;
constexpr int kChebLast = 6;

struct ChebTable {
  std::array<std::array<double, kChebDegree>, kChebLast - kChebFirst + 1> coeff{};

  ChebTable() {
    constexpr int n = kChebDegree;
    for (int k = kChebFirst; k <= kChebLast; ++k) {
      const double lo = std::ldexp(1.0, k);
      const double hi = 2.0 * lo;
      // Samples in extended precision so the table is good to the last bit.
      std::array<long double, n> f{};
      for (int j = 0; j < n; ++j) {
        const long double x = std::cos(std::numbers::pi_v<long double> * (j + 0.5L) / n);
        f[j] = e1_scaled_cf<long double>(0.5L * (lo + hi) + 0.5L * (hi - lo) * x);
      }
      auto& c = coeff[k - kChebFirst];
      for (int m = 0; m < n; ++m) {
        long double sum = 0.0L;
        for (int j = 0; j < n; ++j) {
          sum += f[j] * std::cos(std::numbers::pi_v<long double> * m * (j + 0.5L) / n);
        }
        c[m] = static_cast<double>((m == 0 ? 1.0L : 2.0L) * sum / n);
      }
    }
  }

  double operator()(int k, double u) const {
    const double lo = std::ldexp(1.0, k);
    const double x = (u - 1.5 * lo) / (0.5 * lo);
    const auto& c = coeff[k - kChebFirst];
    double b1 = 0.0;
    double b2 = 0.0;
    for (int m = kChebDegree - 1; m >= 1; --m) {
      const double b0 = 2.0 * x * b1 - b2 + c[m];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }
};

const ChebTable& cheb_table() {
  static const ChebTable table;
  return table;
}

} // namespace

double expint_e1_scaled(double u) {
  if (!(u > 0.0)) {
    throw std::domain_error("expint_e1_scaled: argument must be positive");
  }
  if (u <= kSeriesLimit) {
    return -ei_series(-u) * std::exp(u);
  }
  int k = 0;
  std::frexp(u, &k); // u in [2^{k-1}, 2^k)
  if (k - 1 <= kChebLast) {
    return cheb_table()(k - 1, u);
  }
  return e1_scaled_cf<double>(u);
}

double expint_ei(double x) {
  if (!(x < 0.0)) {
    throw std::domain_error("expint_ei: argument must be negative");
  }
  const double u = -x;
  if (u > kUnderflow) {
    return 0.0;
  }
  if (u <= kSeriesLimit) {
    return ei_series(x);
  }
  return -expint_e1_scaled(u) * std::exp(-u);
}

double heat_G_r2(double t, double r2) {
  if (t <= 0.0) {
    return 0.0;
  }
  return std::exp(-r2 / (4.0 * t)) * kInvFourPi / t;
}

double heat_G(double t, Point2 x) { return heat_G_r2(t, x.x * x.x + x.y * x.y); }

double frak_g(double t, double r2) {
  if (t <= 0.0) {
    return 0.0;
  }
  if (r2 <= 0.0) {
    throw std::domain_error("frak_g: zero distance at positive time");
  }
  const double u = r2 / (4.0 * t);
  if (u > kUnderflow) {
    return 0.0;
  }
  return kInvFourPi * expint_ei(-u);
}

double frak_G(double t, double r2) {
  if (t <= 0.0) {
    return 0.0;
  }
  if (r2 <= 0.0) {
    throw std::domain_error("frak_G: zero distance at positive time");
  }
  const double u = r2 / (4.0 * t);
  if (u > kUnderflow) {
    return 0.0;
  }
  if (u <= kSeriesLimit) {
    return kInvFourPi * t * (std::exp(-u) + (1.0 + u) * ei_series(-u));
  }
  const double factor = u < kGGDirectLimit ? 1.0 - (1.0 + u) * expint_e1_scaled(u) : gg_factor_cf(u);
  return kInvFourPi * t * std::exp(-u) * factor;
}

} // namespace stbem
