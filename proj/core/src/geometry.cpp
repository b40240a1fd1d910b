#include "stbem/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace stbem {

namespace {

constexpr double kTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kTol * (1.0 + std::abs(a) + std::abs(b)); }

bool same_point(Point2 a, Point2 b) { return near(a.x, b.x) && near(a.y, b.y); }

// Positive-length overlap of [a0, a1] and [b0, b1].
bool overlaps(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0) > kTol;
}

bool share_edge(const Square& p, const Square& q) {
  const bool x_touch = near(p.x0 + p.h, q.x0) || near(q.x0 + q.h, p.x0);
  const bool y_touch = near(p.y0 + p.h, q.y0) || near(q.y0 + q.h, p.y0);
  if (x_touch && overlaps(p.y0, p.y0 + p.h, q.y0, q.y0 + q.h)) {
    return true;
  }
  return y_touch && overlaps(p.x0, p.x0 + p.h, q.x0, q.x0 + q.h);
}

std::array<Point2, 4> square_corners(const Square& q) {
  return {Point2{q.x0, q.y0}, Point2{q.x0 + q.h, q.y0}, Point2{q.x0 + q.h, q.y0 + q.h},
          Point2{q.x0, q.y0 + q.h}};
}

// True when segment [a, b] lies on the boundary of q.
bool on_square_boundary(const Square& q, Point2 a, Point2 b) {
  const auto c = square_corners(q);
  for (int e = 0; e < 4; ++e) {
    const Point2 u = c[e];
    const Point2 v = c[(e + 1) % 4];
    if (point_segment_dist2(a, u, v) <= kTol * kTol && point_segment_dist2(b, u, v) <= kTol * kTol) {
      return true;
    }
  }
  return false;
}

void split(std::vector<Square>& leaves, std::size_t i) {
  const Square q = leaves[i];
  const double h = 0.5 * q.h;
  leaves[i] = {q.x0, q.y0, h};
  leaves.push_back({q.x0 + h, q.y0, h});
  leaves.push_back({q.x0, q.y0 + h, h});
  leaves.push_back({q.x0 + h, q.y0 + h, h});
}

} // namespace

double norm(Point2 a) { return std::hypot(a.x, a.y); }

double point_segment_dist2(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = norm2(ab);
  double s = 0.0;
  if (len2 > 0.0) {
    s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  }
  return norm2(p - (a + s * ab));
}

double segment_segment_dist2(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Point2 r = b - a;
  const Point2 s = d - c;
  const double den = cross(r, s);
  if (den != 0.0) {
    const double u = cross(c - a, s) / den;
    const double v = cross(c - a, r) / den;
    if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0) {
      return 0.0;
    }
  }
  return std::min({point_segment_dist2(a, c, d), point_segment_dist2(b, c, d),
                   point_segment_dist2(c, a, b), point_segment_dist2(d, a, b)});
}

BoundaryCurve::BoundaryCurve(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw std::invalid_argument("BoundaryCurve: need at least three vertices");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    corners_.push_back(s);
    s += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
  }
  length_ = s;
}

std::size_t BoundaryCurve::side_of(double s, bool from_left) const {
  if (s < 0.0 || s > length_) {
    throw std::domain_error("BoundaryCurve: parameter outside [0, L]");
  }
  auto it = std::upper_bound(corners_.begin(), corners_.end(), s);
  std::size_t side = static_cast<std::size_t>(it - corners_.begin()) - 1;
  if (from_left && side > 0 && corners_[side] == s) {
    --side;
  } else if (from_left && s == 0.0) {
    side = corners_.size() - 1;
  }
  if (s == length_ && !from_left) {
    side = 0;
  }
  return side;
}

Point2 BoundaryCurve::gamma(double s) const {
  if (s < 0.0 || s > length_) {
    throw std::domain_error("gamma: parameter outside [0, L]");
  }
  if (s == length_) {
    return vertices_.front();
  }
  const std::size_t i = side_of(s);
  return vertices_[i] + (s - corners_[i]) * tangent(i);
}

Point2 BoundaryCurve::tangent(std::size_t side) const {
  const Point2 v = vertices_[(side + 1) % vertices_.size()] - vertices_[side];
  return (1.0 / norm(v)) * v;
}

bool BoundaryCurve::crosses_corner(double c, double d) const {
  const double tol = kTol * (1.0 + length_);
  for (double k : corners_) {
    if (k > c + tol && k < d - tol) {
      return true;
    }
  }
  return false;
}

Domain::Domain(DomainKind kind, std::string name, BoundaryCurve curve, std::vector<Square> squares,
               std::vector<double> breaks)
    : kind_(kind), name_(std::move(name)), curve_(std::move(curve)), squares_(std::move(squares)),
      breaks_(std::move(breaks)) {}

Domain Domain::unit_square() {
  BoundaryCurve curve({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  return Domain(DomainKind::unit_square, "unit_square", std::move(curve), {{0, 0, 1}},
                {0, 1, 2, 3, 4});
}

Domain Domain::lshape() {
  BoundaryCurve curve({{0, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, 0}, {0, 0}});
  return Domain(DomainKind::lshape, "lshape", std::move(curve), {{0, -1, 1}, {0, 0, 1}, {-1, 0, 1}},
                {0, 1, 2, 3, 4, 5, 6, 7, 8});
}

double Domain::area() const {
  double a = 0.0;
  for (const auto& q : squares_) {
    a += q.h * q.h;
  }
  return a;
}

double CurvilinearTriangle::diameter() const {
  return std::sqrt(std::max({norm2(p1 - p0), norm2(p2 - p1), norm2(p0 - p2)}));
}

TriangleImage map_triangle(const CurvilinearTriangle& t, double yh, double zh) {
  return {t.map(yh, zh), t.det()};
}

std::vector<CurvilinearTriangle> seed_triangles(const Domain& domain) {
  std::vector<CurvilinearTriangle> out;
  for (const Square& q : domain.seed_squares()) {
    const auto k = square_corners(q);
    out.push_back({k[0], k[1], k[2]});
    out.push_back({k[0], k[2], k[3]});
  }
  return out;
}

DomainTriangulation build_triangulation(const Domain& domain, double c, double d) {
  const BoundaryCurve& curve = domain.curve();
  if (!(c < d) || c < 0.0 || d > curve.total_length()) {
    throw std::invalid_argument("build_triangulation: invalid arc");
  }
  if (curve.crosses_corner(c, d)) {
    throw std::invalid_argument("build_triangulation: arc crosses a corner");
  }
  const Point2 a = curve.gamma(c);
  const Point2 b = curve.gamma(d);
  const double len = d - c;

  std::vector<Square> leaves = domain.seed_squares();
  bool anchored = false;
  for (int guard = 0; guard < 64 && !anchored; ++guard) {
    std::size_t host = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (on_square_boundary(leaves[i], a, b)) {
        host = i;
        break;
      }
    }
    if (host == leaves.size()) {
      throw std::invalid_argument("build_triangulation: arc is not on a square edge");
    }
    if (near(leaves[host].h, len)) {
      anchored = true;
    } else if (leaves[host].h < len) {
      throw std::invalid_argument("build_triangulation: arc is not dyadic");
    } else {
      split(leaves, host);
    }
  }
  if (!anchored) {
    throw std::invalid_argument("build_triangulation: refinement did not terminate");
  }

  // At most one hanging node per edge: neighbors differ by at most a factor 2.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < leaves.size() && !changed; ++i) {
      for (std::size_t j = 0; j < leaves.size(); ++j) {
        if (leaves[i].h > 2.0 * leaves[j].h + kTol && share_edge(leaves[i], leaves[j])) {
          split(leaves, i);
          changed = true;
          break;
        }
      }
    }
  }

  DomainTriangulation out;
  out.anchor_c = c;
  out.anchor_d = d;
  bool found = false;
  for (const Square& q : leaves) {
    const auto k = square_corners(q);
    for (const CurvilinearTriangle& t : {CurvilinearTriangle{k[0], k[1], k[2]},
                                         CurvilinearTriangle{k[0], k[2], k[3]}}) {
      const std::array<Point2, 3> v{t.p0, t.p1, t.p2};
      int rot = -1;
      for (int r = 0; r < 3 && !found; ++r) {
        if (same_point(v[r], a) && same_point(v[(r + 1) % 3], b)) {
          rot = r;
        }
      }
      if (rot >= 0) {
        out.anchor_index = out.triangles.size();
        out.triangles.push_back({a, b, v[(rot + 2) % 3]});
        found = true;
      } else {
        out.triangles.push_back(t);
      }
    }
  }
  if (!found) {
    throw std::logic_error("build_triangulation: anchor triangle not found");
  }
  return out;
}

std::shared_ptr<const DomainTriangulation> TriangulationCache::get(double c, double d) {
  const std::pair<double, double> key{c, d};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      return it->second;
    }
  }
  auto tri = std::make_shared<const DomainTriangulation>(build_triangulation(*domain_, c, d));
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(key, std::move(tri)).first->second;
}

std::size_t TriangulationCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

} // namespace stbem
