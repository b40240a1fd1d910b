#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace stbem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 a) { return dot(a, a); }
double norm(Point2 a);

/// Squared distance from p to the segment [a, b].
double point_segment_dist2(Point2 p, Point2 a, Point2 b);

/// Squared distance between the segments [a, b] and [c, d].
double segment_segment_dist2(Point2 a, Point2 b, Point2 c, Point2 d);

/// Closed counterclockwise polygon parametrized by arclength.
class BoundaryCurve {
public:
  explicit BoundaryCurve(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  double total_length() const { return length_; }
  const std::vector<double>& corner_params() const { return corners_; }

  /// Point at arclength s in [0, L]; s = L wraps to the first vertex.
  Point2 gamma(double s) const;

  /// Index of the polygon side containing s. Corners belong to the side that
  /// starts there unless `from_left` is set.
  std::size_t side_of(double s, bool from_left = false) const;

  /// Unit tangent of side i.
  Point2 tangent(std::size_t side) const;

  /// True when the open parameter interval (c, d) contains a corner.
  bool crosses_corner(double c, double d) const;

private:
  std::vector<Point2> vertices_;
  std::vector<double> corners_;
  double length_ = 0.0;
};

/// Axis-aligned square of the seed decomposition of the domain.
struct Square {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
};

enum class DomainKind { unit_square, lshape };

/// Polygonal domain together with its seed squares.
class Domain {
public:
  static Domain unit_square();
  static Domain lshape();

  DomainKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const BoundaryCurve& curve() const { return curve_; }
  const std::vector<Square>& seed_squares() const { return squares_; }
  double area() const;

  /// Breakpoints of the corner-aligned uniform initial boundary mesh.
  const std::vector<double>& initial_breaks() const { return breaks_; }

private:
  Domain(DomainKind kind, std::string name, BoundaryCurve curve, std::vector<Square> squares,
         std::vector<double> breaks);

  DomainKind kind_;
  std::string name_;
  BoundaryCurve curve_;
  std::vector<Square> squares_;
  std::vector<double> breaks_;
};

/// Affine triangle y = p0 + ŷ (p1 - p0) + ẑ (p2 - p0) over the reference
/// triangle {ŷ, ẑ >= 0, ŷ + ẑ <= 1}.
struct CurvilinearTriangle {
  Point2 p0;
  Point2 p1;
  Point2 p2;

  double det() const { return cross(p1 - p0, p2 - p0); }
  double area() const { return 0.5 * det(); }
  Point2 map(double yh, double zh) const { return p0 + yh * (p1 - p0) + zh * (p2 - p0); }
  double diameter() const;
};

struct TriangleImage {
  Point2 point;
  double jacobian = 0.0;
};

TriangleImage map_triangle(const CurvilinearTriangle& t, double yh, double zh);

struct DomainTriangulation {
  std::vector<CurvilinearTriangle> triangles;
  double anchor_c = 0.0;
  double anchor_d = 0.0;
  /// Triangle with the anchor arc as edge p0 -> p1, so γ_K(x̂) = γ_T(x̂, 0).
  std::size_t anchor_index = 0;
};

/// Two triangles per seed square; a fixed triangulation of the whole domain.
std::vector<CurvilinearTriangle> seed_triangles(const Domain& domain);

/// Triangulation of the domain adapted to the boundary arc γ([c, d]).
/// Throws std::invalid_argument when the arc crosses a corner or is not an
/// edge of a dyadic refinement of the seed squares.
DomainTriangulation build_triangulation(const Domain& domain, double c, double d);

/// Memoized triangulations keyed by arc; safe for concurrent use.
class TriangulationCache {
public:
  explicit TriangulationCache(const Domain& domain) : domain_(&domain) {}

  std::shared_ptr<const DomainTriangulation> get(double c, double d);
  std::size_t size() const;

private:
  const Domain* domain_;
  mutable std::mutex mutex_;
  std::map<std::pair<double, double>, std::shared_ptr<const DomainTriangulation>> cache_;
};

} // namespace stbem
