#include "primelab/prime_end.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "primelab/metrics.hpp"

namespace primelab {

namespace {

constexpr int kProbeReach = 4;
constexpr int kProbeWidth = 2 * kProbeReach + 1;

// Components of the domain cells strictly within radius_h * h of the anchor,
// labelled on a local (2*reach+1)^2 window. Labels are -1 outside.
int label_window(const GridDomain& dom, Cell anchor, double radius_h,
                 std::array<int, kProbeWidth * kProbeWidth>& labels) {
  labels.fill(-1);
  std::array<std::uint8_t, kProbeWidth * kProbeWidth> in{};
  const double r2 = radius_h * radius_h - 1e-9;
  for (int dj = -kProbeReach; dj <= kProbeReach; ++dj) {
    for (int di = -kProbeReach; di <= kProbeReach; ++di) {
      const Cell q{anchor.i + di, anchor.j + dj};
      if (di * di + dj * dj < r2 && dom.inside(q)) {
        in[(di + kProbeReach) + kProbeWidth * (dj + kProbeReach)] = 1;
      }
    }
  }
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < kProbeWidth * kProbeWidth; ++s) {
    if (in[s] == 0 || labels[s] >= 0) continue;
    labels[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const int ci = cur % kProbeWidth;
      const int cj = cur / kProbeWidth;
      const int nbs[4][2] = {{ci + 1, cj}, {ci - 1, cj}, {ci, cj + 1}, {ci, cj - 1}};
      for (const auto& nb : nbs) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= kProbeWidth || nb[1] >= kProbeWidth) continue;
        const int k = nb[0] + kProbeWidth * nb[1];
        if (in[k] != 0 && labels[k] < 0) {
          labels[k] = next;
          stack.push_back(k);
        }
      }
    }
    ++next;
  }
  return next;
}

int window_index(Cell anchor, Cell c) {
  return (c.i - anchor.i + kProbeReach) + kProbeWidth * (c.j - anchor.j + kProbeReach);
}

CellSet cells_with_label(const GridDomain& dom, Cell anchor, const std::array<int, kProbeWidth * kProbeWidth>& labels,
                         int label) {
  CellSet out;
  for (int k = 0; k < kProbeWidth * kProbeWidth; ++k) {
    if (labels[k] != label) continue;
    out.push_back(dom.id(Cell{anchor.i + k % kProbeWidth - kProbeReach, anchor.j + k / kProbeWidth - kProbeReach}));
  }
  std::sort(out.begin(), out.end());
  return out;
}

CellSet ball_component(const GridDomain& dom, GridId anchor, double radius, const CellSet& seeds) {
  const Cell a = dom.cell(anchor);
  const int reach = static_cast<int>(std::ceil(radius / dom.h())) + 1;
  CellSet window;
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const Cell q{a.i + di, a.j + dj};
      if (dom.inside(q) && std::hypot(di, dj) * dom.h() < radius - 1e-9 * dom.h()) window.push_back(dom.id(q));
    }
  }
  std::sort(window.begin(), window.end());
  for (auto& comp : split_components(dom, window, Connectivity::four)) {
    for (GridId s : seeds) {
      if (std::binary_search(comp.begin(), comp.end(), s)) return comp;
    }
  }
  return {};
}

}  // namespace

Point BoundaryNode::approach_centroid(const GridDomain& dom) const {
  Point c{0.0, 0.0};
  if (approach_cells.empty()) return anchor_point;
  for (GridId id : approach_cells) {
    const Point p = dom.center(id);
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(approach_cells.size());
  c.y /= static_cast<double>(approach_cells.size());
  return c;
}

std::vector<BoundaryNode> build_boundary_nodes(const GridDomain& dom) {
  std::vector<BoundaryNode> nodes;
  std::vector<GridId> nbs;
  std::array<int, kProbeWidth * kProbeWidth> labels{};
  for (GridId anchor : boundary_anchors(dom)) {
    const Cell a = dom.cell(anchor);
    dom.grid_neighbors(anchor, Connectivity::four, nbs);
    CellSet adjacent;
    for (GridId nb : nbs) {
      if (dom.inside(nb)) adjacent.push_back(nb);
    }
    std::sort(adjacent.begin(), adjacent.end());

    std::array<int, 3> counts{};
    std::vector<int> last_labels;
    for (int r = 0; r < 3; ++r) {
      label_window(dom, a, kNodeProbeRadii[r], labels);
      std::vector<int> seen;
      for (GridId c : adjacent) seen.push_back(labels[window_index(a, dom.cell(c))]);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      counts[r] = static_cast<int>(seen.size());
      if (r == 2) last_labels = seen;
    }
    const double h = dom.h();
    if (counts[1] != counts[2]) {
      BoundaryNode node;
      node.anchor = anchor;
      node.anchor_point = dom.center(anchor);
      node.resolved = false;
      node.stable_radius = kNodeProbeRadii[2] * h;
      node.approach_cells = adjacent;
      for (int label : last_labels) node.approach_component = set_union(node.approach_component, cells_with_label(dom, a, labels, label));
      nodes.push_back(std::move(node));
      continue;
    }
    const double stable = (counts[0] == counts[1] ? kNodeProbeRadii[0] : kNodeProbeRadii[1]) * h;
    int approach_id = 0;
    for (int label : last_labels) {
      BoundaryNode node;
      node.anchor = anchor;
      node.anchor_point = dom.center(anchor);
      node.approach_id = approach_id++;
      node.stable_radius = stable;
      node.resolved = true;
      node.approach_component = cells_with_label(dom, a, labels, label);
      for (GridId c : adjacent) {
        if (labels[window_index(a, dom.cell(c))] == label) node.approach_cells.push_back(c);
      }
      nodes.push_back(std::move(node));
    }
  }
  return nodes;
}

std::vector<BoundaryNode> resolved_nodes(const std::vector<BoundaryNode>& nodes) {
  std::vector<BoundaryNode> out;
  std::copy_if(nodes.begin(), nodes.end(), std::back_inserter(out), [](const BoundaryNode& n) { return n.resolved; });
  return out;
}

CellSet relative_boundary(const GridDomain& dom, const CellSet& set) {
  std::vector<std::uint8_t> member(dom.point_count(), 0);
  for (GridId id : set) member[id] = 1;
  CellSet out;
  std::vector<GridId> nbs;
  for (GridId id : set) {
    dom.grid_neighbors(id, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (dom.inside(nb) && member[nb] == 0) {
        out.push_back(id);
        break;
      }
    }
  }
  return out;
}

namespace {

CellSet adjacent_anchors(const GridDomain& dom, const CellSet& set) {
  std::vector<GridId> out;
  std::vector<GridId> nbs;
  for (GridId id : set) {
    dom.grid_neighbors(id, Connectivity::four, nbs);
    for (GridId nb : nbs) {
      if (!dom.inside(nb)) out.push_back(nb);
    }
  }
  return make_cell_set(std::move(out));
}

double level_separation(const GridDomain& dom, const CellSet& outer, const CellSet& inner) {
  const CellSet bo = relative_boundary(dom, outer);
  const CellSet bi = relative_boundary(dom, inner);
  if (bo.empty() || bi.empty()) return kInfinity;
  return maz_separation(dom, bo, bi);
}

}  // namespace

Chain validate_chain(const GridDomain& dom, std::vector<CellSet> levels) {
  if (levels.empty()) throw ChainError(0, 'p', "a chain needs at least one level");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    auto& level = levels[k];
    level = make_cell_set(std::move(level));
    const int idx = static_cast<int>(k) + 1;
    std::ostringstream msg;
    if (level.empty()) {
      msg << "level " << idx << " is empty (condition a)";
      throw ChainError(idx, 'a', msg.str());
    }
    for (GridId id : level) {
      if (!dom.inside(id)) {
        msg << "level " << idx << " contains a point outside the domain (condition a)";
        throw ChainError(idx, 'a', msg.str());
      }
    }
    if (!is_connected(dom, level, Connectivity::four)) {
      msg << "level " << idx << " is not connected (condition a)";
      throw ChainError(idx, 'a', msg.str());
    }
    if (!touches_boundary(dom, level)) {
      msg << "level " << idx << " does not touch the boundary (condition a)";
      throw ChainError(idx, 'a', msg.str());
    }
    if (k > 0 && !is_subset(level, levels[k - 1])) {
      msg << "level " << idx << " is not contained in level " << idx - 1 << " (condition a)";
      throw ChainError(idx, 'a', msg.str());
    }
  }
  Chain chain;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double sep = level_separation(dom, levels[k], levels[k + 1]);
    if (!(sep > 0.0)) {
      std::ostringstream msg;
      msg << "relative boundaries of levels " << k + 1 << " and " << k + 2 << " are not separated (condition b)";
      throw ChainError(static_cast<int>(k) + 2, 'b', msg.str());
    }
    chain.separations.push_back(sep);
  }
  chain.impression = adjacent_anchors(dom, levels.back());
  if (chain.impression.empty()) {
    throw ChainError(static_cast<int>(levels.size()), 'c', "deepest level has an empty impression (condition c)");
  }
  chain.levels = std::move(levels);
  return chain;
}

bool divides(const Chain& a, const Chain& b) {
  for (const auto& f : b.levels) {
    const bool found = std::any_of(a.levels.begin(), a.levels.end(), [&](const CellSet& e) { return is_subset(e, f); });
    if (!found) return false;
  }
  return true;
}

bool equivalent(const Chain& a, const Chain& b) { return divides(a, b) && divides(b, a); }

std::vector<GridId> rasterize_polyline(const GridDomain& dom, const std::vector<Point>& polyline) {
  std::vector<GridId> path;
  if (polyline.empty()) return path;
  auto push = [&](Cell c) {
    if (!dom.inside(c)) return false;
    const GridId id = dom.id(c);
    if (path.empty() || path.back() != id) path.push_back(id);
    return true;
  };
  Cell prev = dom.nearest_point(polyline.front());
  if (!push(prev)) return path;
  const double step = 0.25 * dom.h();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    const Point p = polyline[k];
    const Point q = polyline[k + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(distance(p, q) / step)));
    for (int s = 1; s <= n; ++s) {
      const double t = static_cast<double>(s) / n;
      const Cell c = dom.nearest_point({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      if (c == prev) continue;
      if (c.i != prev.i && c.j != prev.j) {
        const Cell via_x{c.i, prev.j};
        const Cell via_y{prev.i, c.j};
        if (!push(dom.inside(via_x) ? via_x : via_y)) return path;
      }
      if (!push(c)) return path;
      prev = c;
    }
  }
  return path;
}

namespace {

// Path index at which each polyline vertex is reached, for the reached prefix.
std::vector<std::size_t> vertex_positions(const GridDomain& dom, const std::vector<Point>& polyline,
                                          const std::vector<GridId>& path) {
  std::vector<std::size_t> pos;
  std::size_t cursor = 0;
  for (const Point& v : polyline) {
    const Cell c = dom.nearest_point(v);
    if (!dom.inside(c)) break;
    const GridId id = dom.id(c);
    auto it = std::find(path.begin() + static_cast<std::ptrdiff_t>(cursor), path.end(), id);
    if (it == path.end()) break;
    cursor = static_cast<std::size_t>(it - path.begin());
    pos.push_back(cursor);
  }
  return pos;
}

}  // namespace

Chain chain_of_curve(const GridDomain& dom, const std::vector<Point>& polyline) {
  const auto path = rasterize_polyline(dom, polyline);
  if (path.empty()) throw ChainError(0, 'p', "curve does not start inside the domain");
  if (!touches_boundary(dom, CellSet{path.back()})) {
    throw ChainError(0, 'p', "curve has an interior cluster point: its end does not reach the boundary");
  }
  auto starts = vertex_positions(dom, polyline, path);
  if (starts.empty()) starts.push_back(0);
  // The tail beginning at the last reached vertex is a single point; the
  // deepest usable tail starts one vertex earlier.
  if (starts.size() > 1 && starts.back() + 1 >= path.size()) starts.pop_back();

  const double h = dom.h();
  const std::size_t depth = starts.size() - 1;
  std::vector<CellSet> candidates;
  for (std::size_t k = 0; k <= depth; ++k) {
    const CellSet tail = make_cell_set(std::vector<GridId>(path.begin() + static_cast<std::ptrdiff_t>(starts[k]), path.end()));
    if (k == depth) {
      candidates.push_back(tail);
      continue;
    }
    const double radius = std::min(12.0, 3.0 * static_cast<double>(depth - k)) * h;
    const CellSet nbhd = maz_neighborhood(dom, tail, radius);
    for (auto& comp : split_components(dom, nbhd, Connectivity::four)) {
      if (std::binary_search(comp.begin(), comp.end(), tail.front())) {
        candidates.push_back(std::move(comp));
        break;
      }
    }
  }

  std::vector<CellSet> kept{candidates.back()};
  for (std::size_t k = candidates.size() - 1; k-- > 0;) {
    const CellSet& inner = kept.back();
    const CellSet& outer = candidates[k];
    if (outer.size() <= inner.size() || !is_subset(inner, outer)) continue;
    if (level_separation(dom, outer, inner) > 0.0) kept.push_back(outer);
  }
  std::reverse(kept.begin(), kept.end());
  return validate_chain(dom, std::move(kept));
}

Chain node_chain(const GridDomain& dom, const BoundaryNode& node) {
  const double h = dom.h();
  std::vector<CellSet> levels;
  levels.push_back(ball_component(dom, node.anchor, 8.0 * h, node.approach_cells));
  levels.push_back(ball_component(dom, node.anchor, 4.0 * h, node.approach_cells));
  CellSet near;
  for (GridId id : node.approach_component) {
    if (distance(dom.center(id), node.anchor_point) < 1.5 * h) near.push_back(id);
  }
  for (auto& comp : split_components(dom, near, Connectivity::four)) {
    if (!set_intersection(comp, node.approach_cells).empty()) {
      levels.push_back(std::move(comp));
      break;
    }
  }
  return validate_chain(dom, std::move(levels));
}

End make_end(const GridDomain& /*dom*/, Chain chain, const std::vector<BoundaryNode>& nodes) {
  End end;
  end.singleton = chain.impression.size() == 1;
  if (end.singleton) {
    const GridId anchor = chain.impression.front();
    for (const auto& n : nodes) {
      if (n.anchor == anchor && n.resolved && !set_intersection(n.approach_cells, chain.levels.back()).empty()) {
        end.node = n;
        break;
      }
    }
  }
  end.representative = std::move(chain);
  return end;
}

bool is_subset(const PrimeEndSet& sub, const PrimeEndSet& super) {
  return is_subset(sub.cells, super.cells) &&
         std::includes(super.nodes.begin(), super.nodes.end(), sub.nodes.begin(), sub.nodes.end());
}

PrimeEndSet pushforward(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const CellSet& ambient) {
  PrimeEndSet out;
  for (GridId id : ambient) {
    if (dom.inside(id)) out.cells.push_back(id);
  }
  out.cells = make_cell_set(std::move(out.cells));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].resolved && std::binary_search(ambient.begin(), ambient.end(), nodes[k].anchor)) {
      out.nodes.push_back(static_cast<int>(k));
    }
  }
  return out;
}

CellSet pullback(const std::vector<BoundaryNode>& nodes, const PrimeEndSet& set) {
  std::vector<GridId> out(set.cells.begin(), set.cells.end());
  for (int k : set.nodes) out.push_back(nodes.at(static_cast<std::size_t>(k)).anchor);
  return make_cell_set(std::move(out));
}

DensityReport density_diagnostic(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                 const std::vector<Chain>& chains) {
  DensityReport report;
  for (const auto& chain : chains) {
    std::vector<DensityLevel> rows;
    for (std::size_t k = 0; k < chain.levels.size(); ++k) {
      DensityLevel row;
      row.level = static_cast<int>(k) + 1;
      row.nearest_node_distance = kInfinity;
      for (const auto& n : nodes) {
        if (!n.resolved || set_intersection(n.approach_cells, chain.levels[k]).empty()) continue;
        ++row.nodes_inside;
        for (GridId a : chain.impression) {
          row.nearest_node_distance = std::min(row.nearest_node_distance, distance(dom.center(a), n.anchor_point));
        }
      }
      if (!std::isfinite(row.nearest_node_distance)) report.all_finite = false;
      rows.push_back(row);
    }
    report.chains.push_back(std::move(rows));
  }
  return report;
}

}  // namespace primelab
