#include "primelab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace primelab {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < bytes; ++k) {
    hash ^= p[k];
    hash *= kFnvPrime;
  }
}

constexpr int kDi4[4] = {1, -1, 0, 0};
constexpr int kDj4[4] = {0, 0, 1, -1};
constexpr int kDi8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDj8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance_to_segment(Point p, const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  return distance(p, {s.a.x + t * dx, s.a.y + t * dy});
}

CellSet make_cell_set(std::vector<GridId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool is_subset(const CellSet& sub, const CellSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

CellSet set_union(const CellSet& a, const CellSet& b) {
  CellSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CellSet set_intersection(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

GridDomain::GridDomain(int nx, int ny, double h, Point origin, std::vector<std::uint8_t> mask,
                       Connectivity connectivity)
    : nx_(nx), ny_(ny), h_(h), origin_(origin), mask_(std::move(mask)), connectivity_(connectivity) {
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw DomainError("grid spacing h must be positive");
  if (nx_ < 3 || ny_ < 3) throw DomainError("bounding grid must be at least 3x3");
  if (mask_.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {
    throw DomainError("mask size does not match nx*ny");
  }
  for (GridId id = 0; id < static_cast<GridId>(mask_.size()); ++id) {
    if (mask_[id] == 0) continue;
    mask_[id] = 1;
    const Cell c = cell(id);
    if (c.i == 0 || c.j == 0 || c.i == nx_ - 1 || c.j == ny_ - 1) {
      std::ostringstream msg;
      msg << "cell (" << c.i << "," << c.j << ") touches the bounding box; the domain must lie strictly inside";
      throw DomainError(msg.str());
    }
    cells_.push_back(id);
  }
  if (cells_.empty()) throw DomainError("empty mask: the domain has no cells");

  int count = 0;
  const auto labels = label_components(*this, connectivity_, &count);
  if (count > 1) {
    std::vector<std::size_t> sizes(count, 0);
    for (GridId id : cells_) ++sizes[labels[id]];
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sizes[a] > sizes[b]; });
    std::ostringstream msg;
    msg << "disconnected mask: " << count << " components; largest have " << sizes[order[0]] << " and "
        << sizes[order[1]] << " cells";
    for (int k = 0; k < 2; ++k) {
      for (GridId id : cells_) {
        if (labels[id] == order[k]) {
          const Cell c = cell(id);
          msg << (k == 0 ? " (first at " : ", second at ") << c.i << "," << c.j;
          break;
        }
      }
    }
    msg << ")";
    throw DomainError(msg.str());
  }

  std::uint64_t hash = kFnvOffset;
  fnv_mix(hash, &nx_, sizeof nx_);
  fnv_mix(hash, &ny_, sizeof ny_);
  fnv_mix(hash, &h_, sizeof h_);
  fnv_mix(hash, &origin_.x, sizeof origin_.x);
  fnv_mix(hash, &origin_.y, sizeof origin_.y);
  fnv_mix(hash, mask_.data(), mask_.size());
  fingerprint_ = hash;
}

Point GridDomain::center(GridId id) const { return center(cell(id)); }

Point GridDomain::center(Cell c) const { return {origin_.x + c.i * h_, origin_.y + c.j * h_}; }

double GridDomain::measure() const { return static_cast<double>(cells_.size()) * h_ * h_; }

Cell GridDomain::nearest_point(Point p) const {
  int i = static_cast<int>(std::lround((p.x - origin_.x) / h_));
  int j = static_cast<int>(std::lround((p.y - origin_.y) / h_));
  return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
}

GridId GridDomain::nearest_cell(Point p) const {
  const Cell c = nearest_point(p);
  if (inside(c)) return id(c);
  GridId best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (GridId id : cells_) {
    const double d = distance(center(id), p);
    if (d < best_d - 1e-12 * h_) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

void GridDomain::grid_neighbors(GridId id, Connectivity conn, std::vector<GridId>& out) const {
  out.clear();
  const Cell c = cell(id);
  const int n = conn == Connectivity::four ? 4 : 8;
  const int* di = conn == Connectivity::four ? kDi4 : kDi8;
  const int* dj = conn == Connectivity::four ? kDj4 : kDj8;
  for (int k = 0; k < n; ++k) {
    const Cell nb{c.i + di[k], c.j + dj[k]};
    if (in_bounds(nb)) out.push_back(this->id(nb));
  }
}

std::vector<int> label_components(const GridDomain& dom, Connectivity conn, int* count) {
  std::vector<int> labels(dom.point_count(), -1);
  int next = 0;
  std::vector<GridId> stack;
  std::vector<GridId> nbs;
  for (GridId seed : dom.cells()) {
    if (labels[seed] >= 0) continue;
    labels[seed] = next;
    stack.push_back(seed);
    while (!stack.empty()) {
      const GridId cur = stack.back();
      stack.pop_back();
      dom.grid_neighbors(cur, conn, nbs);
      for (GridId nb : nbs) {
        if (dom.inside(nb) && labels[nb] < 0) {
          labels[nb] = next;
          stack.push_back(nb);
        }
      }
    }
    ++next;
  }
  if (count != nullptr) *count = next;
  return labels;
}

std::vector<CellSet> split_components(const GridDomain& dom, const CellSet& cells, Connectivity conn) {
  std::vector<CellSet> out;
  std::vector<std::uint8_t> member(dom.point_count(), 0);
  for (GridId id : cells) member[id] = 1;
  std::vector<GridId> stack;
  std::vector<GridId> nbs;
  for (GridId seed : cells) {
    if (member[seed] != 1) continue;
    CellSet comp;
    member[seed] = 2;
    stack.push_back(seed);
    while (!stack.empty()) {
      const GridId cur = stack.back();
      stack.pop_back();
      comp.push_back(cur);
      dom.grid_neighbors(cur, conn, nbs);
      for (GridId nb : nbs) {
        if (member[nb] == 1) {
          member[nb] = 2;
          stack.push_back(nb);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool is_connected(const GridDomain& dom, const CellSet& cells, Connectivity conn) {
  return !cells.empty() && split_components(dom, cells, conn).size() == 1;
}

CellSet boundary_anchors(const GridDomain& dom) {
  CellSet out;
  std::vector<GridId> nbs;
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (dom.inside(id)) continue;
    dom.grid_neighbors(id, Connectivity::four, nbs);
    if (std::any_of(nbs.begin(), nbs.end(), [&](GridId nb) { return dom.inside(nb); })) out.push_back(id);
  }
  return out;
}

bool touches_boundary(const GridDomain& dom, const CellSet& cells) {
  std::vector<GridId> nbs;
  for (GridId id : cells) {
    dom.grid_neighbors(id, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (!dom.inside(nb)) return true;
    }
  }
  return false;
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::square: return "square";
    case DomainKind::comb: return "comb";
    case DomainKind::double_comb: return "double_comb";
    case DomainKind::slit: return "slit";
    case DomainKind::annulus: return "annulus";
    case DomainKind::custom: return "custom";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  for (auto k : {DomainKind::square, DomainKind::comb, DomainKind::double_comb, DomainKind::slit,
                 DomainKind::annulus, DomainKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown domain kind '" + name + "'");
}

std::vector<Segment> comb_teeth(int teeth) {
  std::vector<Segment> out;
  for (int n = 2; n <= teeth + 1; ++n) {
    const double x = 1.0 / n;
    out.push_back({{x, 0.0}, {x, 0.5}});
  }
  return out;
}

std::vector<Segment> double_comb_teeth(int teeth) {
  std::vector<Segment> out;
  for (int n = 2; n <= teeth + 1; ++n) {
    const double xb = 1.0 / (2.0 * n);
    const double xt = 1.0 / (2.0 * n + 1.0);
    out.push_back({{xb, 0.0}, {xb, 1.0 - 1.0 / n}});
    out.push_back({{xt, 1.0 / n}, {xt, 1.0}});
  }
  return out;
}

namespace {

int unit_count(double extent, double h) {
  const double n = extent / h;
  const long r = std::lround(n);
  if (std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n)) {
    throw DomainError("h must divide the domain extent evenly");
  }
  return static_cast<int>(r);
}

// Greedy right-to-left selection: a vertical tooth survives when it keeps a
// gap of at least 2h to the previously kept tooth (or the wall x = 1) and to x = 0.
void clip_teeth(const std::vector<Segment>& teeth, double h, const std::string& label,
                std::vector<Segment>& kept, std::vector<ClippedFeature>& clipped) {
  double last_x = 1.0;
  const double min_gap = 2.0 * h - 1e-12;
  for (std::size_t k = 0; k < teeth.size(); ++k) {
    const double x = teeth[k].a.x;
    if (last_x - x < min_gap) {
      clipped.push_back({label, static_cast<int>(k), teeth[k], "gap to neighboring tooth below 2h"});
    } else if (x < min_gap) {
      clipped.push_back({label, static_cast<int>(k), teeth[k], "gap to left wall below 2h"});
    } else {
      kept.push_back(teeth[k]);
      last_x = x;
    }
  }
}

std::vector<std::uint8_t> sample_square(int n, double h, const std::vector<Segment>& removed) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n + 1) * (n + 1), 0);
  const double band = 0.5 * h + 1e-12 * h;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      const Point p{i * h, j * h};
      bool in = true;
      for (const auto& s : removed) {
        if (distance_to_segment(p, s) <= band) {
          in = false;
          break;
        }
      }
      mask[i + (n + 1) * j] = in ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace

GeneratedDomain generate(const DomainSpec& spec) {
  if (!(spec.h > 0.0)) throw DomainError("h must be positive");
  const double h = spec.h;
  std::vector<ClippedFeature> clipped;
  std::vector<Segment> kept;

  switch (spec.kind) {
    case DomainKind::square:
    case DomainKind::comb:
    case DomainKind::double_comb:
    case DomainKind::slit: {
      const int n = unit_count(1.0, h);
      if (n < 2) throw DomainError("h too coarse for the unit square");
      if (spec.kind == DomainKind::comb) {
        if (spec.teeth < 1) throw DomainError("comb needs at least one tooth");
        clip_teeth(comb_teeth(spec.teeth), h, "tooth", kept, clipped);
      } else if (spec.kind == DomainKind::double_comb) {
        if (spec.teeth < 1) throw DomainError("double comb needs at least one tooth index");
        clip_teeth(double_comb_teeth(spec.teeth), h, "tooth", kept, clipped);
      } else if (spec.kind == DomainKind::slit) {
        const auto& s = spec.slit;
        auto in_box = [](Point p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; };
        if (!in_box(s.a) || !in_box(s.b)) throw DomainError("slit endpoints must lie in the unit square");
        kept.push_back(s);
      }
      auto mask = sample_square(n, h, kept);
      GridDomain dom(n + 1, n + 1, h, {0.0, 0.0}, std::move(mask), spec.connectivity);
      return {std::move(dom), std::move(clipped), std::move(kept)};
    }
    case DomainKind::annulus: {
      if (!(spec.r_inner >= 0.0 && spec.r_outer > spec.r_inner)) {
        throw DomainError("annulus radii must satisfy 0 <= r_inner < r_outer");
      }
      const int n = unit_count(2.0 * spec.r_outer, h);
      const Point origin{spec.center.x - spec.r_outer, spec.center.y - spec.r_outer};
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(n + 1) * (n + 1), 0);
      for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
          const double r = distance({origin.x + i * h, origin.y + j * h}, spec.center);
          mask[i + (n + 1) * j] = (r > spec.r_inner && r < spec.r_outer) ? 1 : 0;
        }
      }
      GridDomain dom(n + 1, n + 1, h, origin, std::move(mask), spec.connectivity);
      return {std::move(dom), std::move(clipped), std::move(kept)};
    }
    case DomainKind::custom: {
      if (spec.rows.empty()) throw DomainError("custom domain needs mask rows");
      const int ny = static_cast<int>(spec.rows.size());
      const int nx = static_cast<int>(spec.rows.front().size());
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 0);
      for (int r = 0; r < ny; ++r) {
        const auto& row = spec.rows[r];
        if (static_cast<int>(row.size()) != nx) throw DomainError("custom mask rows have unequal length");
        const int j = ny - 1 - r;
        for (int i = 0; i < nx; ++i) {
          const char ch = row[i];
          if (ch == '1' || ch == '#') {
            mask[i + nx * j] = 1;
          } else if (ch != '0' && ch != '.') {
            throw DomainError(std::string("custom mask contains invalid character '") + ch + "'");
          }
        }
      }
      GridDomain dom(nx, ny, h, {0.0, 0.0}, std::move(mask), spec.connectivity);
      return {std::move(dom), std::move(clipped), std::move(kept)};
    }
  }
  throw DomainError("unhandled domain kind");
}

std::vector<GridId> cell_neighbors(const GridDomain& dom, GridId c) {
  if (!dom.inside(c)) throw DomainError("cell is not part of the domain");
  std::vector<GridId> nbs;
  dom.grid_neighbors(c, dom.connectivity(), nbs);
  std::vector<GridId> out;
  for (GridId nb : nbs) {
    if (dom.inside(nb)) out.push_back(nb);
  }
  return out;
}

CellSet neighborhood(const GridDomain& dom, const CellSet& seeds, double r) {
  if (r < 0.0) throw DomainError("neighborhood radius must be nonnegative");
  const double h = dom.h();
  const double r2 = r * r + 1e-12 * h * h;
  const int reach = static_cast<int>(std::floor(r / h + 1e-9));
  std::vector<std::uint8_t> hit(dom.point_count(), 0);
  for (GridId s : seeds) {
    const Cell c = dom.cell(s);
    for (int dj = -reach; dj <= reach; ++dj) {
      for (int di = -reach; di <= reach; ++di) {
        const Cell q{c.i + di, c.j + dj};
        if (!dom.inside(q)) continue;
        const double d2 = (di * h) * (di * h) + (dj * h) * (dj * h);
        if (d2 <= r2) hit[dom.id(q)] = 1;
      }
    }
  }
  CellSet out;
  for (GridId id : dom.cells()) {
    if (hit[id] != 0) out.push_back(id);
  }
  return out;
}

}  // namespace primelab
