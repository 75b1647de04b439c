#include "primelab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace primelab {

namespace {

using QueueEntry = std::pair<double, GridId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

double grid_dist(const GridDomain& dom, GridId a, GridId b) {
  const Cell ca = dom.cell(a);
  const Cell cb = dom.cell(b);
  const double di = ca.i - cb.i;
  const double dj = ca.j - cb.j;
  return dom.h() * std::sqrt(di * di + dj * dj);
}

// Minimax path search over 4-connected cells in `allowed` (or the whole mask
// when allowed is empty): returns the least over paths from `from` to `to`
// of the largest key along the path, ignoring cells whose key exceeds bound.
template <typename Key>
double bottleneck(const GridDomain& dom, GridId from, GridId to, Key key, double bound,
                  const std::vector<std::uint8_t>* allowed = nullptr) {
  const double start = std::max(key(from), key(to));
  if (start > bound) return kInfinity;
  if (from == to) return start;
  std::vector<double> best(dom.point_count(), kInfinity);
  MinQueue queue;
  best[from] = start;
  queue.emplace(start, from);
  std::vector<GridId> nbs;
  while (!queue.empty()) {
    const auto [cost, cur] = queue.top();
    queue.pop();
    if (cost > best[cur]) continue;
    if (cur == to) return cost;
    dom.grid_neighbors(cur, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (!dom.inside(nb)) continue;
      if (allowed != nullptr && (*allowed)[nb] == 0) continue;
      const double c = std::max(cost, key(nb));
      if (c > bound) continue;
      if (c < best[nb]) {
        best[nb] = c;
        queue.emplace(c, nb);
      }
    }
  }
  return kInfinity;
}

CellSet component_containing(const GridDomain& dom, GridId seed, const std::vector<std::uint8_t>& allowed) {
  CellSet comp;
  if (allowed[seed] == 0) return comp;
  std::vector<std::uint8_t> seen(dom.point_count(), 0);
  std::vector<GridId> stack{seed};
  seen[seed] = 1;
  std::vector<GridId> nbs;
  while (!stack.empty()) {
    const GridId cur = stack.back();
    stack.pop_back();
    comp.push_back(cur);
    dom.grid_neighbors(cur, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (allowed[nb] != 0 && seen[nb] == 0 && dom.inside(nb)) {
        seen[nb] = 1;
        stack.push_back(nb);
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

std::vector<GridId> bfs_path(const GridDomain& dom, GridId from, GridId to, const std::vector<std::uint8_t>& allowed) {
  std::vector<GridId> parent(dom.point_count(), -1);
  std::vector<GridId> queue{from};
  parent[from] = from;
  std::vector<GridId> nbs;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const GridId cur = queue[head];
    if (cur == to) break;
    dom.grid_neighbors(cur, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (allowed[nb] != 0 && parent[nb] < 0 && dom.inside(nb)) {
        parent[nb] = cur;
        queue.push_back(nb);
      }
    }
  }
  std::vector<GridId> path;
  if (parent[to] < 0) return path;
  for (GridId cur = to; cur != from; cur = parent[cur]) path.push_back(cur);
  path.push_back(from);
  return path;
}

// Drops extreme cells while x and y stay connected.
CellSet prune_witness(const GridDomain& dom, CellSet w, GridId x, GridId y) {
  std::vector<std::uint8_t> allowed(dom.point_count(), 0);
  for (GridId id : w) allowed[id] = 1;
  const double eps = 1e-9 * dom.h();
  while (w.size() > 2) {
    std::vector<double> ecc(w.size(), 0.0);
    double diam = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) {
      for (std::size_t b = a + 1; b < w.size(); ++b) {
        const double d = grid_dist(dom, w[a], w[b]);
        ecc[a] = std::max(ecc[a], d);
        ecc[b] = std::max(ecc[b], d);
      }
      diam = std::max(diam, ecc[a]);
    }
    bool removed = false;
    for (std::size_t a = 0; a < w.size() && !removed; ++a) {
      const GridId cand = w[a];
      if (ecc[a] < diam - eps || cand == x || cand == y) continue;
      allowed[cand] = 0;
      CellSet comp = component_containing(dom, x, allowed);
      if (std::binary_search(comp.begin(), comp.end(), y)) {
        for (GridId id : w) allowed[id] = 0;
        for (GridId id : comp) allowed[id] = 1;
        w = std::move(comp);
        removed = true;
      } else {
        allowed[cand] = 1;
      }
    }
    if (!removed) break;
  }
  return w;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  auto cross = [](Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::ambient: return "ambient";
    case MetricKind::inner: return "inner";
    case MetricKind::mazurkiewicz_bracket: return "mazurkiewicz_bracket";
  }
  return "unknown";
}

double set_diameter(const GridDomain& dom, const CellSet& cells) {
  if (cells.size() < 2) return 0.0;
  double best = 0.0;
  if (cells.size() <= 64) {
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) best = std::max(best, grid_dist(dom, cells[a], cells[b]));
    }
    return best;
  }
  std::vector<Point> pts;
  pts.reserve(cells.size());
  for (GridId id : cells) {
    const Cell c = dom.cell(id);
    pts.push_back({static_cast<double>(c.i), static_cast<double>(c.j)});
  }
  const auto hull = convex_hull(std::move(pts));
  for (std::size_t a = 0; a < hull.size(); ++a) {
    for (std::size_t b = a + 1; b < hull.size(); ++b) {
      best = std::max(best, std::hypot(hull[a].x - hull[b].x, hull[a].y - hull[b].y));
    }
  }
  return best * dom.h();
}

DistanceField inner_distance_field(const GridDomain& dom, const CellSet& sources) {
  DistanceField field;
  field.source = sources;
  field.kind = MetricKind::inner;
  field.values.assign(dom.point_count(), kInfinity);
  MinQueue queue;
  for (GridId s : sources) {
    if (!dom.inside(s)) throw DomainError("distance source is not a domain cell");
    field.values[s] = 0.0;
    queue.emplace(0.0, s);
  }
  const double h = dom.h();
  const double diag = std::sqrt(2.0) * h;
  while (!queue.empty()) {
    const auto [dist, cur] = queue.top();
    queue.pop();
    if (dist > field.values[cur]) continue;
    const Cell c = dom.cell(cur);
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const Cell q{c.i + di, c.j + dj};
        if (!dom.inside(q)) continue;
        double step = h;
        if (di != 0 && dj != 0) {
          if (!dom.inside(Cell{c.i + di, c.j}) || !dom.inside(Cell{c.i, c.j + dj})) continue;
          step = diag;
        }
        const GridId nb = dom.id(q);
        const double nd = dist + step;
        if (nd < field.values[nb]) {
          field.values[nb] = nd;
          queue.emplace(nd, nb);
        }
      }
    }
  }
  return field;
}

DistanceField inner_distance_field(const GridDomain& dom, GridId source) {
  return inner_distance_field(dom, CellSet{source});
}

DistanceField ambient_distance_field(const GridDomain& dom, GridId source) {
  DistanceField field;
  field.source = {source};
  field.kind = MetricKind::ambient;
  field.values.assign(dom.point_count(), kInfinity);
  for (GridId id : dom.cells()) field.values[id] = grid_dist(dom, source, id);
  return field;
}

double inner_distance(const GridDomain& dom, GridId x, GridId y) {
  if (!dom.inside(x) || !dom.inside(y)) throw DomainError("inner distance endpoints must be domain cells");
  if (x == y) return 0.0;
  return inner_distance_field(dom, x).values[y];
}

double mazurkiewicz_lower(const GridDomain& dom, GridId x, GridId y) {
  if (!dom.inside(x) || !dom.inside(y)) throw DomainError("Mazurkiewicz endpoints must be domain cells");
  if (x == y) return 0.0;
  auto key = [&](GridId c) { return std::max(grid_dist(dom, c, x), grid_dist(dom, c, y)); };
  return bottleneck(dom, x, y, key, kInfinity);
}

MazBracket mazurkiewicz_distance(const GridDomain& dom, GridId x, GridId y, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("Mazurkiewicz tolerance must be positive");
  MazBracket out;
  if (x == y) {
    if (!dom.inside(x)) throw DomainError("Mazurkiewicz endpoints must be domain cells");
    out.witness = {x};
    return out;
  }
  out.lo = mazurkiewicz_lower(dom, x, y);
  if (!std::isfinite(out.lo)) {
    out.hi = kInfinity;
    return out;
  }

  const double eps = 1e-9 * dom.h();
  std::vector<std::uint8_t> lens(dom.point_count(), 0);
  const int reach = static_cast<int>(std::ceil(out.lo / dom.h())) + 1;
  const Cell cx = dom.cell(x);
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const Cell q{cx.i + di, cx.j + dj};
      if (!dom.inside(q)) continue;
      const GridId id = dom.id(q);
      if (std::max(grid_dist(dom, id, x), grid_dist(dom, id, y)) <= out.lo + eps) lens[id] = 1;
    }
  }
  const CellSet region = component_containing(dom, x, lens);
  std::vector<std::uint8_t> in_region(dom.point_count(), 0);
  for (GridId id : region) in_region[id] = 1;

  CellSet best = region;
  double best_diam = set_diameter(dom, region);

  // Candidate centers: every region cell for small regions, otherwise a
  // deterministic stride sample plus the cell nearest the midpoint.
  std::vector<GridId> centers;
  const std::size_t max_centers = 96;
  if (region.size() <= 256) {
    centers = region;
  } else {
    const std::size_t stride = (region.size() + max_centers - 1) / max_centers;
    for (std::size_t k = 0; k < region.size(); k += stride) centers.push_back(region[k]);
  }
  const Point px = dom.center(x);
  const Point py = dom.center(y);
  const Cell mid = dom.nearest_point({0.5 * (px.x + py.x), 0.5 * (px.y + py.y)});
  if (dom.in_bounds(mid) && in_region[dom.id(mid)] != 0) centers.push_back(dom.id(mid));

  double best_radius = kInfinity;
  GridId best_center = -1;
  for (GridId m : centers) {
    auto key = [&](GridId c) { return grid_dist(dom, c, m); };
    const double rho = bottleneck(dom, x, y, key, kInfinity, &in_region);
    if (rho < best_radius - eps) {
      best_radius = rho;
      best_center = m;
    }
  }
  if (best_center >= 0) {
    std::vector<std::uint8_t> ball(dom.point_count(), 0);
    for (GridId id : region) {
      if (grid_dist(dom, id, best_center) <= best_radius + eps) ball[id] = 1;
    }
    CellSet cand = component_containing(dom, x, ball);
    if (cand.size() > 600) {
      cand = make_cell_set(bfs_path(dom, x, y, ball));
    }
    const double d = set_diameter(dom, cand);
    if (d < best_diam) {
      best_diam = d;
      best = std::move(cand);
    }
  }
  if (best.size() <= 600) {
    CellSet pruned = prune_witness(dom, best, x, y);
    const double d = set_diameter(dom, pruned);
    if (d <= best_diam) {
      best_diam = d;
      best = std::move(pruned);
    }
  }
  out.hi = best_diam;
  out.witness = std::move(best);
  return out;
}

double maz_separation(const GridDomain& dom, const CellSet& a, const CellSet& b) {
  if (a.empty() || b.empty()) return kInfinity;
  if (!set_intersection(a, b).empty()) return 0.0;
  std::vector<std::uint8_t> in_b(dom.point_count(), 0);
  for (GridId id : b) in_b[id] = 1;
  std::vector<GridId> nbs;
  for (GridId id : a) {
    dom.grid_neighbors(id, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (in_b[nb] != 0) return 0.0;
    }
  }
  std::vector<std::tuple<double, GridId, GridId>> pairs;
  pairs.reserve(a.size() * b.size());
  for (GridId u : a) {
    for (GridId v : b) pairs.emplace_back(grid_dist(dom, u, v), u, v);
  }
  std::sort(pairs.begin(), pairs.end());
  double best = kInfinity;
  for (const auto& [d, u, v] : pairs) {
    if (d >= best) break;
    auto key = [&](GridId c) { return std::max(grid_dist(dom, c, u), grid_dist(dom, c, v)); };
    best = std::min(best, bottleneck(dom, u, v, key, best));
  }
  return best;
}

CellSet maz_neighborhood(const GridDomain& dom, const CellSet& seeds, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("Mazurkiewicz neighborhood radius must be positive");
  const double h = dom.h();
  const double eps = 1e-9 * h;
  std::vector<std::uint8_t> hit(dom.point_count(), 0);
  std::vector<std::uint8_t> ball(dom.point_count(), 0);
  std::vector<std::uint8_t> lens(dom.point_count(), 0);
  const int reach = static_cast<int>(std::ceil(r / h)) + 1;

  for (GridId a : seeds) {
    if (!dom.inside(a)) continue;
    hit[a] = 1;
    const Cell ca = dom.cell(a);
    std::vector<GridId> window;
    for (int dj = -reach; dj <= reach; ++dj) {
      for (int di = -reach; di <= reach; ++di) {
        const Cell q{ca.i + di, ca.j + dj};
        if (!dom.inside(q)) continue;
        const GridId id = dom.id(q);
        if (grid_dist(dom, id, a) < r - eps) {
          ball[id] = 1;
          window.push_back(id);
        }
      }
    }
    const CellSet reachable = component_containing(dom, a, ball);
    // Inside the half-radius ball every path point is within r of both ends.
    for (GridId id : window) ball[id] = grid_dist(dom, id, a) < 0.5 * r - eps ? 1 : 0;
    for (GridId id : component_containing(dom, a, ball)) hit[id] = 1;
    for (GridId id : window) ball[id] = 0;

    for (GridId c : reachable) {
      if (hit[c] != 0) continue;
      for (GridId id : reachable) lens[id] = grid_dist(dom, id, c) < r - eps ? 1 : 0;
      const CellSet comp = component_containing(dom, a, lens);
      for (GridId id : reachable) lens[id] = 0;
      if (std::binary_search(comp.begin(), comp.end(), c)) hit[c] = 1;
    }
  }
  CellSet out;
  for (GridId id : dom.cells()) {
    if (hit[id] != 0) out.push_back(id);
  }
  return out;
}

}  // namespace primelab
