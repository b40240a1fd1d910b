#pragma once

#include "stbem/residual.hpp"

#include <functional>
#include <memory>

namespace stbem {

/// The residual restricted to one element, with cheap one-dimensional slices.
class ElementField {
public:
  virtual ~ElementField() = default;
  virtual double at(double t, double s) const = 0;
  /// s ↦ r(t, s) on the element's arc.
  virtual std::function<double(double)> at_time(double t) const;
  /// t ↦ r(t, s) on the element's slab.
  virtual std::function<double(double)> at_space(double s) const;
};

/// Polynomial interpolant of r on one element, sampled at nt x nx nodes:
/// Chebyshev points in w = sqrt((t - a)/|J|), which absorbs the square-root
/// behaviour of the single layer potential at the start of a slab, and
/// Chebyshev-Lobatto points in arclength.
class InterpolatedField : public ElementField {
public:
  InterpolatedField(const PrismElement& p, const std::function<double(double, double)>& r, int nt = 8, int nx = 8);

  double at(double t, double s) const override;
  std::function<double(double)> at_time(double t) const override;
  std::function<double(double)> at_space(double s) const override;

private:
  double a_;
  double h_;
  double c_;
  double len_;
  std::vector<double> w_;
  std::vector<double> wt_; // barycentric weights in w
  std::vector<double> z_;
  std::vector<double> zt_; // barycentric weights in z
  std::vector<double> values_; // row major: time node, space node
};

/// Evaluates r directly at every point; slow, used for validation.
class DirectField : public ElementField {
public:
  explicit DirectField(std::function<double(double, double)> r) : r_(std::move(r)) {}
  double at(double t, double s) const override { return r_(t, s); }

private:
  std::function<double(double, double)> r_;
};

using FieldSet = std::vector<std::shared_ptr<const ElementField>>;

struct EstimatorOptions {
  int plain = 12;
  int inv_sqrt = 12;
  int field_nt = 8;
  int field_nx = 8;
  bool interpolate = true;
};

/// Per-element squared indicators and their sums (ascending id, compensated).
struct IndicatorSet {
  std::vector<double> eta_x_sq;
  std::vector<double> eta_t_sq;
  std::vector<double> zeta_x_sq;
  std::vector<double> zeta_t_sq;
  double eta_x_sum = 0.0;
  double eta_t_sum = 0.0;
  double zeta_x_sum = 0.0;
  double zeta_t_sum = 0.0;

  double eta_sq() const { return eta_x_sum + eta_t_sum; }
  double zeta_sq() const { return zeta_x_sum + zeta_t_sum; }
};

/// |v|²_{H^{1/2}} of v over one straight arc of length len, given in local
/// arclength s in [0, len].
double seminorm_space_self(const std::function<double(double)>& v, double len, const EstimatorOptions& o);

/// 2 ∫_K ∫_K̃ |v(x) - ṽ(y)|² / |x - y|² for arcs K, K̃ of Γ sharing exactly one
/// endpoint. v and ṽ take arclength parameters.
double seminorm_space_cross(const BoundaryCurve& curve, const SpaceArc& k, const std::function<double(double)>& v,
                            const SpaceArc& kt, const std::function<double(double)>& vt, const EstimatorOptions& o);

/// |v|²_{H^{1/4}(J)} for v given in absolute time on J = [a, a + h].
double seminorm_time_self(const std::function<double(double)>& v, double a, double h, const EstimatorOptions& o);

/// 2 ∫_J ∫_J̃ |v(t) - ṽ(s)|² / |t - s|^{3/2} for adjacent intervals.
double seminorm_time_cross(const std::function<double(double)>& v, const TimeSlab& j,
                           const std::function<double(double)>& vt, const TimeSlab& jt, const EstimatorOptions& o);

/// (ζ^x, ζ^t) squared: ‖r‖²_{L2(P)} weighted by diam(K)^{-1} and |J|^{-1/2}.
std::pair<double, double> zeta_element(const PrismElement& p, const ElementField& r, const EstimatorOptions& o = {});

double eta_x_element(const SpaceTimeMesh& mesh, std::size_t i, const FieldSet& fields, const EstimatorOptions& o = {});
double eta_t_element(const SpaceTimeMesh& mesh, std::size_t i, const FieldSet& fields, const EstimatorOptions& o = {});

/// One field per element; interpolated or direct according to the options.
FieldSet build_fields(const ResidualEvaluator& r, const EstimatorOptions& o = {});

IndicatorSet indicators_from_fields(const SpaceTimeMesh& mesh, const FieldSet& fields, const EstimatorOptions& o = {});

IndicatorSet compute_indicators(const SpaceTimeMesh& mesh, const Eigen::VectorXd& phi, const ProblemSpec& problem,
                                const QuadOrders& q = {}, const EstimatorOptions& o = {});

/// Kahan-compensated sum in the given order.
double compensated_sum(const std::vector<double>& v);

struct PoincareSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of ‖v‖² <= C (diam(K)^{2μ} |v|²_{L2(J;H^μ(K))} + |J|^{2ν} |v|²_{H^ν(J;L2(K))})
/// on the flat element [0, h] x [0, len]; v(t, s) in local coordinates.
PoincareSides poincare_check(double h, double len, const std::function<double(double, double)>& v, double mu = 0.5,
                             double nu = 0.25);

} // namespace stbem
