#include "stbem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace stbem {

namespace {

double overlap(double a0, double a1, double b0, double b1) { return std::min(a1, b1) - std::max(a0, b0); }

struct Cell {
  TimeSlab slab;
  SpaceArc arc;
  std::size_t parent = 0;
};

std::vector<PrismElement> to_elements(const std::vector<Cell>& cells) {
  std::vector<PrismElement> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.push_back({cells[i].slab, cells[i].arc, i});
  }
  return out;
}

void split_time(std::vector<Cell>& out, const Cell& c) {
  const double m = 0.5 * (c.slab.a + c.slab.b);
  out.push_back({{c.slab.a, m, c.slab.level + 1}, c.arc, c.parent});
  out.push_back({{m, c.slab.b, c.slab.level + 1}, c.arc, c.parent});
}

void split_space(std::vector<Cell>& out, const Cell& c) {
  const double m = 0.5 * (c.arc.c + c.arc.d);
  out.push_back({c.slab, {c.arc.c, m, c.arc.level + 1}, c.parent});
  out.push_back({c.slab, {m, c.arc.d, c.arc.level + 1}, c.parent});
}

// Applies the requested bisections; `times` bisects in time that many times.
std::vector<Cell> apply_splits(const std::vector<Cell>& cells, const std::vector<int>& times,
                               const std::vector<char>& space) {
  std::vector<Cell> out;
  out.reserve(cells.size() * 2);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<Cell> cur{cells[i]};
    if (space[i] != 0) {
      std::vector<Cell> next;
      for (const Cell& c : cur) {
        split_space(next, c);
      }
      cur = std::move(next);
    }
    for (int k = 0; k < times[i]; ++k) {
      std::vector<Cell> next;
      for (const Cell& c : cur) {
        split_time(next, c);
      }
      cur = std::move(next);
    }
    out.insert(out.end(), cur.begin(), cur.end());
  }
  return out;
}

SpaceTimeMesh finish(const SpaceTimeMesh& mesh, std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
    return std::tie(x.parent, x.slab.a, x.arc.c) < std::tie(y.parent, y.slab.a, y.arc.c);
  });
  std::vector<std::size_t> parent;
  parent.reserve(cells.size());
  for (const Cell& c : cells) {
    parent.push_back(c.parent);
  }
  return SpaceTimeMesh(mesh.domain_ptr(), mesh.end_time(), to_elements(cells), std::move(parent));
}

std::vector<Cell> to_cells(const SpaceTimeMesh& mesh) {
  std::vector<Cell> cells;
  cells.reserve(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    cells.push_back({mesh[i].slab, mesh[i].arc, i});
  }
  return cells;
}

std::vector<char> membership(std::size_t n, const std::vector<std::size_t>& ids) {
  std::vector<char> m(n, 0);
  for (std::size_t id : ids) {
    if (id >= n) {
      throw std::out_of_range("refine: marked element id out of range");
    }
    m[id] = 1;
  }
  return m;
}

enum class Closure { isotropic, anisotropic, parabolic };

bool space_touch_at(const SpaceArc& other, double point, double length) {
  // `other` ends at `point` (with wrap at L).
  return other.d == point || (point == 0.0 && other.d == length);
}

bool space_touch_end(const SpaceArc& other, double point, double length) {
  return other.c == point || (point == length && other.c == 0.0);
}

// Number of distinct hanging vertices on the worst edge of element i.
int hanging_on_element(const SpaceTimeMesh& m, std::size_t i) {
  const PrismElement& p = m[i];
  const double len = m.domain().curve().total_length();
  std::set<double> left;
  std::set<double> right;
  std::set<double> bottom;
  std::set<double> top;
  for (std::size_t j : m.edge_neighbors(i)) {
    const PrismElement& q = m[j];
    const bool time_overlap = overlap(p.slab.a, p.slab.b, q.slab.a, q.slab.b) > 0.0;
    const bool space_overlap = overlap(p.arc.c, p.arc.d, q.arc.c, q.arc.d) > 0.0;
    if (time_overlap) {
      auto add = [&](std::set<double>& s) {
        for (double v : {q.slab.a, q.slab.b}) {
          if (v > p.slab.a && v < p.slab.b) {
            s.insert(v);
          }
        }
      };
      if (space_touch_at(q.arc, p.arc.c, len)) {
        add(left);
      }
      if (space_touch_end(q.arc, p.arc.d, len)) {
        add(right);
      }
    }
    if (space_overlap) {
      auto add = [&](std::set<double>& s) {
        for (double v : {q.arc.c, q.arc.d}) {
          if (v > p.arc.c && v < p.arc.d) {
            s.insert(v);
          }
        }
      };
      if (q.slab.b == p.slab.a) {
        add(bottom);
      }
      if (q.slab.a == p.slab.b) {
        add(top);
      }
    }
  }
  return static_cast<int>(std::max({left.size(), right.size(), bottom.size(), top.size()}));
}

std::vector<Cell> close(const SpaceTimeMesh& base, std::vector<Cell> cells, Closure kind) {
  for (int pass = 0; pass < 10000; ++pass) {
    SpaceTimeMesh m(base.domain_ptr(), base.end_time(), to_elements(cells));
    std::vector<int> times(cells.size(), 0);
    std::vector<char> space(cells.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const PrismElement& p = m[i];
      if (kind == Closure::isotropic) {
        if (hanging_on_element(m, i) >= 2) {
          times[i] = 1;
          space[i] = 1;
          any = true;
        }
        continue;
      }
      for (std::size_t j : m.edge_neighbors(i)) {
        const PrismElement& q = m[j];
        if (q.slab.level >= p.slab.level + 2) {
          times[i] = 1;
        }
        if (q.arc.level >= p.arc.level + 2) {
          space[i] = 1;
        }
      }
      if (kind == Closure::parabolic && times[i] == 0 && space[i] == 0) {
        const double ht = p.slab.length();
        const double hx = p.arc.length();
        if (ht > 2.0 * hx * hx) {
          times[i] = 1;
        } else if (ht < 0.5 * hx * hx) {
          space[i] = 1;
        }
      }
      any = any || times[i] != 0 || space[i] != 0;
    }
    if (!any) {
      return cells;
    }
    cells = apply_splits(cells, times, space);
  }
  throw std::logic_error("mesh closure did not terminate");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

} // namespace

SpaceTimeMesh::SpaceTimeMesh(std::shared_ptr<const Domain> domain, double end_time,
                             std::vector<PrismElement> elements, std::vector<std::size_t> parent)
    : domain_(std::move(domain)), end_time_(end_time), elements_(std::move(elements)),
      parent_(std::move(parent)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    elements_[i].id = i;
  }
  build_index();
}

void SpaceTimeMesh::build_index() {
  by_c_.resize(elements_.size());
  max_arc_ = 0.0;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    by_c_[i] = i;
    max_arc_ = std::max(max_arc_, elements_[i].arc.length());
  }
  std::sort(by_c_.begin(), by_c_.end(), [this](std::size_t x, std::size_t y) {
    return std::tie(elements_[x].arc.c, elements_[x].slab.a) < std::tie(elements_[y].arc.c, elements_[y].slab.a);
  });
}

double SpaceTimeMesh::total_measure() const {
  double s = 0.0;
  for (const auto& e : elements_) {
    s += e.measure();
  }
  return s;
}

std::vector<std::size_t> SpaceTimeMesh::arc_candidates(double c, double d) const {
  const double len = domain_->curve().total_length();
  std::vector<std::size_t> out;
  auto range = [&](double lo, double hi) {
    auto first = std::lower_bound(by_c_.begin(), by_c_.end(), lo,
                                  [this](std::size_t i, double v) { return elements_[i].arc.c < v; });
    for (auto it = first; it != by_c_.end() && elements_[*it].arc.c <= hi; ++it) {
      out.push_back(*it);
    }
  };
  range(c - max_arc_, d);
  if (c == 0.0) {
    range(len - max_arc_, len);
  }
  if (d == len) {
    range(0.0, 0.0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> SpaceTimeMesh::neighbors_x(std::size_t i) const {
  const PrismElement& p = elements_.at(i);
  const double len = domain_->curve().total_length();
  std::vector<std::size_t> out;
  for (std::size_t j : arc_candidates(p.arc.c, p.arc.d)) {
    const PrismElement& q = elements_[j];
    if (overlap(p.slab.a, p.slab.b, q.slab.a, q.slab.b) <= 0.0) {
      continue;
    }
    const bool meet = overlap(p.arc.c, p.arc.d, q.arc.c, q.arc.d) >= 0.0 ||
                      (p.arc.c == 0.0 && q.arc.d == len) || (p.arc.d == len && q.arc.c == 0.0);
    if (meet) {
      out.push_back(j);
    }
  }
  return out;
}

std::vector<std::size_t> SpaceTimeMesh::neighbors_t(std::size_t i) const {
  const PrismElement& p = elements_.at(i);
  std::vector<std::size_t> out;
  for (std::size_t j : arc_candidates(p.arc.c, p.arc.d)) {
    const PrismElement& q = elements_[j];
    if (overlap(p.arc.c, p.arc.d, q.arc.c, q.arc.d) <= 0.0) {
      continue;
    }
    if (overlap(p.slab.a, p.slab.b, q.slab.a, q.slab.b) >= 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

std::vector<std::size_t> SpaceTimeMesh::edge_neighbors(std::size_t i) const {
  std::vector<std::size_t> out = neighbors_x(i);
  const std::vector<std::size_t> t = neighbors_t(i);
  out.insert(out.end(), t.begin(), t.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), i), out.end());
  return out;
}

SpaceTimeMesh initial_mesh(std::shared_ptr<const Domain> domain, double end_time) {
  if (!(end_time > 0.0)) {
    throw std::invalid_argument("initial_mesh: end time must be positive");
  }
  const auto& breaks = domain->initial_breaks();
  std::vector<PrismElement> elements;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    elements.push_back({{0.0, end_time, 0}, {breaks[i], breaks[i + 1], 0}, i});
  }
  return SpaceTimeMesh(std::move(domain), end_time, std::move(elements));
}

SpaceTimeMesh uniform_refine(const SpaceTimeMesh& mesh) {
  const std::vector<Cell> cells = to_cells(mesh);
  return finish(mesh, apply_splits(cells, std::vector<int>(cells.size(), 1),
                                   std::vector<char>(cells.size(), 1)));
}

SpaceTimeMesh refine_isotropic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& marked) {
  const std::vector<char> m = membership(mesh.size(), marked);
  std::vector<int> times(m.begin(), m.end());
  std::vector<Cell> cells = apply_splits(to_cells(mesh), times, m);
  return finish(mesh, close(mesh, std::move(cells), Closure::isotropic));
}

SpaceTimeMesh refine_anisotropic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& mark_x,
                                 const std::vector<std::size_t>& mark_t) {
  const std::vector<char> mx = membership(mesh.size(), mark_x);
  const std::vector<char> mt = membership(mesh.size(), mark_t);
  std::vector<int> times(mt.begin(), mt.end());
  std::vector<Cell> cells = apply_splits(to_cells(mesh), times, mx);
  return finish(mesh, close(mesh, std::move(cells), Closure::anisotropic));
}

bool in_parabolic_window(const PrismElement& e) {
  const double ht = e.slab.length();
  const double hx2 = e.arc.length() * e.arc.length();
  return 0.5 * hx2 <= ht && ht <= 2.0 * hx2;
}

SpaceTimeMesh refine_parabolic(const SpaceTimeMesh& mesh, const std::vector<std::size_t>& marked,
                               ParabolicMode mode) {
  for (const auto& e : mesh.elements()) {
    if (!in_parabolic_window(e)) {
      throw std::invalid_argument("refine_parabolic: mesh violates h_x^2/2 <= h_t <= 2 h_x^2");
    }
  }
  const std::vector<Cell> cells = to_cells(mesh);
  if (mode == ParabolicMode::uniform) {
    std::vector<int> times(cells.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double hx = 0.5 * cells[i].arc.length();
      int k = 3;
      for (; k >= 0; --k) {
        const double ht = std::ldexp(cells[i].slab.length(), -k);
        if (0.5 * hx * hx <= ht && ht <= 2.0 * hx * hx) {
          break;
        }
      }
      if (k < 0) {
        throw std::logic_error("refine_parabolic: no admissible time bisection count");
      }
      times[i] = k;
    }
    return finish(mesh, apply_splits(cells, times, std::vector<char>(cells.size(), 1)));
  }
  const std::vector<char> m = membership(mesh.size(), marked);
  std::vector<int> times(m.begin(), m.end());
  std::vector<Cell> refined = apply_splits(cells, times, m);
  return finish(mesh, close(mesh, std::move(refined), Closure::parabolic));
}

LevelJumps max_level_jumps(const SpaceTimeMesh& mesh) {
  LevelJumps out;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    for (std::size_t j : mesh.edge_neighbors(i)) {
      out.time = std::max(out.time, std::abs(mesh[i].slab.level - mesh[j].slab.level));
      out.space = std::max(out.space, std::abs(mesh[i].arc.level - mesh[j].arc.level));
    }
  }
  return out;
}

int max_hanging_nodes(const SpaceTimeMesh& mesh) {
  int worst = 0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    worst = std::max(worst, hanging_on_element(mesh, i));
  }
  return worst;
}

MeshConstants mesh_constants(const SpaceTimeMesh& mesh) {
  MeshConstants out;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const PrismElement& p = mesh[i];
    const std::vector<std::size_t> nx = mesh.neighbors_x(i);
    // Sample P|_t at the midpoints of the time intervals cut out by neighbors.
    std::vector<double> cuts{p.slab.a, p.slab.b};
    for (std::size_t j : nx) {
      for (double v : {mesh[j].slab.a, mesh[j].slab.b}) {
        if (v > p.slab.a && v < p.slab.b) {
          cuts.push_back(v);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double t = 0.5 * (cuts[k] + cuts[k + 1]);
      int count = 0;
      for (std::size_t j : nx) {
        if (mesh[j].slab.a < t && t < mesh[j].slab.b) {
          ++count;
        }
      }
      out.c_nei = std::max(out.c_nei, count);
    }
    for (std::size_t j : mesh.neighbors_t(i)) {
      out.c_lqu = std::max(out.c_lqu, p.slab.length() / mesh[j].slab.length());
    }
  }
  return out;
}

void write_mesh(std::ostream& os, const SpaceTimeMesh& mesh) {
  for (const auto& e : mesh.elements()) {
    os << format_double(e.slab.a) << ' ' << format_double(e.slab.b) << ' ' << format_double(e.arc.c) << ' '
       << format_double(e.arc.d) << ' ' << e.slab.level << ' ' << e.arc.level << '\n';
  }
}

SpaceTimeMesh read_mesh(std::istream& is, std::shared_ptr<const Domain> domain, double end_time) {
  std::vector<PrismElement> elements;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    PrismElement e;
    if (!(ls >> e.slab.a >> e.slab.b >> e.arc.c >> e.arc.d >> e.slab.level >> e.arc.level)) {
      throw std::runtime_error("read_mesh: malformed line: " + line);
    }
    elements.push_back(e);
  }
  return SpaceTimeMesh(std::move(domain), end_time, std::move(elements));
}

} // namespace stbem
