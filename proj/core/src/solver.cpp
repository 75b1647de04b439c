#include "primelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "primelab/metrics.hpp"

namespace primelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Solves on the cells with one ghost per node whose entry in `ghost_values` is
// finite. `lower` (per grid id, may be empty) bounds the cells from below.
GridFunction solve_on_cells(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                            const std::vector<double>& ghost_values, double p, const SolverOptions& options,
                            const std::vector<double>& initial, const std::vector<double>& lower) {
  std::vector<std::uint8_t> include(dom.point_count(), 0);
  for (GridId id : dom.cells()) include[id] = 1;
  std::vector<int> ghosts;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (std::isfinite(ghost_values[n])) ghosts.push_back(static_cast<int>(n));
  }
  const auto fg = build_function_graph(dom, include, nodes, ghosts);
  const std::size_t nv = fg.graph.vertex_count;

  std::vector<double> fixed(nv, kNaN);
  std::vector<double> start;
  if (!initial.empty()) start.assign(nv, 0.0);
  std::vector<double> bound;
  if (!lower.empty()) bound.assign(nv, -kInfinity);
  for (std::size_t v = 0; v < nv; ++v) {
    const GridId id = fg.vertex_point[v];
    if (id < 0) {
      fixed[v] = ghost_values[fg.vertex_node[v]];
      if (!start.empty()) start[v] = fixed[v];
      continue;
    }
    if (!start.empty() && std::isfinite(initial[id])) start[v] = initial[id];
    if (!bound.empty() && !std::isnan(lower[id])) bound[v] = lower[id];
  }

  const MinimizeResult result = bound.empty()
                                    ? minimize_p_energy(fg.graph, p, fixed, start, false, options)
                                    : minimize_p_energy_above(fg.graph, p, fixed, bound, start, false, options);

  GridFunction u;
  u.domain_key = dom.fingerprint();
  u.values.assign(dom.point_count(), kNaN);
  u.node_values.assign(nodes.size(), kNaN);
  for (std::size_t v = 0; v < nv; ++v) {
    if (fg.vertex_point[v] >= 0) {
      u.values[fg.vertex_point[v]] = result.u[v];
    } else {
      u.node_values[fg.vertex_node[v]] = result.u[v];
    }
  }
  return u;
}

std::vector<double> constrained_data(const DirichletProblem& prob) {
  std::vector<double> out(prob.nodes.size(), kNaN);
  for (std::size_t n = 0; n < prob.nodes.size(); ++n) {
    if (prob.nodes[n].resolved && std::isfinite(prob.data[n])) out[n] = prob.data[n];
  }
  return out;
}

}  // namespace

void validate(const DirichletProblem& prob) {
  if (!(prob.p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (prob.data.size() != prob.nodes.size()) {
    std::ostringstream msg;
    msg << "data has " << prob.data.size() << " entries for " << prob.nodes.size() << " boundary nodes";
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t n = 0; n < prob.nodes.size(); ++n) {
    if (prob.nodes[n].resolved && std::isfinite(prob.data[n])) return;
  }
  throw std::invalid_argument("no resolved boundary node carries data: the boundary is degenerate");
}

GridFunction solve_dirichlet(const GridDomain& dom, const DirichletProblem& prob) {
  validate(prob);
  if (!prob.initial_guess.empty() && prob.initial_guess.size() != dom.point_count()) {
    throw std::invalid_argument("initial guess has the wrong size");
  }
  return solve_on_cells(dom, prob.nodes, constrained_data(prob), prob.p, prob.options, prob.initial_guess, {});
}

GridFunction solve_obstacle(const GridDomain& dom, const ObstacleProblem& prob) {
  validate(prob.base);
  check_same_domain(dom, prob.psi);
  for (GridId id : dom.cells()) {
    const double psi = prob.psi.values[id];
    if (std::isinf(psi) && psi > 0.0) {
      const Cell c = dom.cell(id);
      std::ostringstream msg;
      msg << "obstacle is +infinity at cell (" << c.i << ", " << c.j << "): no admissible function";
      throw DomainError(msg.str());
    }
  }
  return solve_on_cells(dom, prob.base.nodes, constrained_data(prob.base), prob.base.p, prob.base.options,
                        prob.base.initial_guess, prob.psi.values);
}

DifferenceField perturbation_difference(const GridDomain& dom, const DirichletProblem& prob,
                                        const std::vector<double>& delta) {
  validate(prob);
  if (delta.size() != prob.nodes.size()) throw std::invalid_argument("delta must have one entry per node");
  const std::vector<double> base = constrained_data(prob);
  const GridFunction u0 = solve_on_cells(dom, prob.nodes, base, prob.p, prob.options, prob.initial_guess, {});

  std::vector<std::uint8_t> include(dom.point_count(), 0);
  for (GridId id : dom.cells()) include[id] = 1;
  std::vector<int> ghosts;
  for (std::size_t n = 0; n < base.size(); ++n) {
    if (std::isfinite(base[n])) ghosts.push_back(static_cast<int>(n));
  }
  const auto fg = build_function_graph(dom, include, prob.nodes, ghosts);
  const std::size_t nv = fg.graph.vertex_count;
  auto on_vertices = [&](const GridFunction& u) {
    std::vector<double> x(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      x[v] = fg.vertex_point[v] >= 0 ? u.values[fg.vertex_point[v]] : u.node_values[fg.vertex_node[v]];
    }
    return x;
  };
  const std::vector<double> x0 = on_vertices(u0);
  std::vector<double> shift(nv, kNaN);
  for (std::size_t v = 0; v < nv; ++v) {
    if (fg.vertex_node[v] >= 0) shift[v] = std::isfinite(delta[fg.vertex_node[v]]) ? delta[fg.vertex_node[v]] : 0.0;
  }

  std::vector<double> seed;
  if (prob.p != 2.0) {
    std::vector<double> moved(base);
    for (std::size_t n = 0; n < moved.size(); ++n) {
      if (std::isfinite(moved[n]) && std::isfinite(delta[n])) moved[n] += delta[n];
    }
    const GridFunction u1 = solve_on_cells(dom, prob.nodes, moved, prob.p, prob.options, u0.values, {});
    seed = on_vertices(u1);
    for (std::size_t v = 0; v < nv; ++v) seed[v] -= x0[v];
  }
  const std::vector<long double> w = minimize_difference(fg.graph, prob.p, x0, shift, seed, false, prob.options);

  DifferenceField out;
  out.value.domain_key = dom.fingerprint();
  out.value.values.assign(dom.point_count(), kNaN);
  out.value.node_values.assign(prob.nodes.size(), kNaN);
  out.log10_abs.assign(dom.point_count(), kNaN);
  for (std::size_t v = 0; v < nv; ++v) {
    if (fg.vertex_point[v] >= 0) {
      out.value.values[fg.vertex_point[v]] = static_cast<double>(w[v]);
      out.log10_abs[fg.vertex_point[v]] = static_cast<double>(std::log10(std::abs(w[v])));
    } else {
      out.value.node_values[fg.vertex_node[v]] = static_cast<double>(w[v]);
    }
  }
  return out;
}

ComparisonReport comparison_check(const GridDomain& dom, const GridFunction& u, const GridFunction& v, double tol) {
  check_same_domain(dom, u);
  check_same_domain(dom, v);
  ComparisonReport report;
  report.max_violation = -kInfinity;
  for (GridId id : dom.cells()) {
    if (!u.defined(id) || !v.defined(id)) continue;
    const double d = v.values[id] - u.values[id];
    if (d > report.max_violation) {
      report.max_violation = d;
      report.location = id;
    }
  }
  report.node_violation = -kInfinity;
  const std::size_t nn = std::min(u.node_values.size(), v.node_values.size());
  for (std::size_t n = 0; n < nn; ++n) {
    if (std::isfinite(u.node_values[n]) && std::isfinite(v.node_values[n])) {
      report.node_violation = std::max(report.node_violation, v.node_values[n] - u.node_values[n]);
    }
  }
  report.holds = report.max_violation <= tol;
  return report;
}

PerronReport perron_gap(const GridDomain& dom, const DirichletProblem& prob, double tol) {
  validate(prob);
  const double h = dom.h();
  PerronReport report;
  report.tolerance = tol > 0.0 ? tol : h;
  report.solution = solve_dirichlet(dom, prob);

  const std::vector<double> base = constrained_data(prob);
  std::vector<double> up(base);
  std::vector<double> down(base.size(), kNaN);  // negated lower data
  for (std::size_t n = 0; n < base.size(); ++n) {
    if (std::isfinite(base[n])) down[n] = -base[n];
  }
  double global_max = -kInfinity;
  double global_min = kInfinity;
  for (double d : base) {
    if (!std::isfinite(d)) continue;
    global_max = std::max(global_max, d);
    global_min = std::min(global_min, d);
  }
  for (std::size_t n = 0; n < prob.nodes.size(); ++n) {
    if (prob.nodes[n].resolved) continue;
    ++report.unresolved_nodes;
    double hi = -kInfinity;
    double lo = kInfinity;
    for (std::size_t m = 0; m < prob.nodes.size(); ++m) {
      if (!std::isfinite(base[m])) continue;
      if (distance(prob.nodes[m].anchor_point, prob.nodes[n].anchor_point) <= 4.0 * h * (1.0 + 1e-9)) {
        hi = std::max(hi, base[m]);
        lo = std::min(lo, base[m]);
      }
    }
    if (!std::isfinite(hi)) {
      hi = global_max;
      lo = global_min;
    }
    up[n] = hi + report.tolerance;
    down[n] = -(lo - report.tolerance);
  }

  if (report.unresolved_nodes == 0) {
    report.upper = report.solution;
    report.lower = report.solution;
  } else {
    std::vector<double> psi_up(report.solution.values);
    std::vector<double> psi_down(report.solution.values.size(), kNaN);
    for (GridId id : dom.cells()) psi_down[id] = -report.solution.values[id];
    report.upper = solve_on_cells(dom, prob.nodes, up, prob.p, prob.options, report.solution.values, psi_up);
    report.lower = solve_on_cells(dom, prob.nodes, down, prob.p, prob.options, psi_down, psi_down);
    for (double& x : report.lower.values) x = -x;
    for (double& x : report.lower.node_values) x = -x;
  }

  report.upper_minus_lower = 0.0;
  for (GridId id : dom.cells()) {
    const double gap = report.upper.values[id] - report.lower.values[id];
    if (gap > report.upper_minus_lower) {
      report.upper_minus_lower = gap;
      report.location = id;
    }
  }
  report.resolutive = report.upper_minus_lower <= 10.0 * report.tolerance;
  return report;
}

PerronReport perturbation_experiment(const std::vector<SweepMember>& family, const DataRule& f, const RegionRule& region,
                                     const PerturbationSettings& settings) {
  if (family.empty()) throw std::invalid_argument("perturbation sweep needs at least one domain");
  PerronReport report;
  for (const auto& member : family) {
    const GridDomain& dom = member.domain;
    PerturbationRow row;
    row.label = member.label;
    row.h = dom.h();
    row.teeth = member.teeth;
    row.retained_features = member.retained_features;
    row.probes = settings.probes;

    DirichletProblem prob;
    prob.nodes = build_boundary_nodes(dom);
    prob.p = settings.p;
    prob.options = settings.options;
    prob.data.resize(prob.nodes.size());
    std::vector<GridId> anchors;
    for (std::size_t n = 0; n < prob.nodes.size(); ++n) {
      prob.data[n] = f(dom, prob.nodes[n]);
      if (region(prob.nodes[n].anchor_point)) anchors.push_back(prob.nodes[n].anchor);
    }
    const CellSet e = make_cell_set(std::move(anchors));

    std::vector<double> delta(prob.nodes.size(), 0.0);
    for (std::size_t n = 0; n < prob.nodes.size(); ++n) {
      if (prob.nodes[n].resolved && std::isfinite(prob.data[n]) &&
          std::binary_search(e.begin(), e.end(), prob.nodes[n].anchor)) {
        delta[n] = 1.0;
        ++row.perturbed_nodes;
      }
    }

    row.difference = GridFunction::on_cells(dom, 0.0);
    std::vector<double> log_gap(dom.point_count(), -kInfinity);
    if (row.perturbed_nodes > 0) {
      const DifferenceField w = perturbation_difference(dom, prob, delta);
      for (GridId id : dom.cells()) row.difference.values[id] = std::abs(w.value.values[id]);
      log_gap = w.log10_abs;
    }
    for (GridId id : dom.cells()) row.max_gap = std::max(row.max_gap, row.difference.values[id]);
    for (const Point& probe : settings.probes) {
      const GridId id = dom.nearest_cell(probe);
      row.probe_gaps.push_back(row.difference.values[id]);
      row.probe_log10_gaps.push_back(log_gap[id]);
    }

    row.prime_end_capacity =
        prime_end_capacity(dom, prob.nodes, pushforward(dom, prob.nodes, e), settings.p, settings.options);
    row.ambient_capacity = ambient_capacity(dom, e, settings.p, settings.options);
    report.perturbation_gaps.push_back(std::move(row));
  }

  const auto& rows = report.perturbation_gaps;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    for (std::size_t q = 0; q < settings.probes.size(); ++q) {
      if (!(rows[k].probe_log10_gaps[q] < rows[k - 1].probe_log10_gaps[q])) {
        report.gaps_decreasing = false;
        std::ostringstream msg;
        msg << "probe_gap_" << q << ": " << rows[k].label << " does not decrease from " << rows[k - 1].label;
        report.failures.push_back(msg.str());
      }
    }
    const double prev = rows[k - 1].prime_end_capacity;
    if (rows[k].prime_end_capacity > prev + settings.capacity_tolerance * std::max(1.0, prev)) {
      report.capacity_nonincreasing = false;
      report.failures.push_back("prime_end_capacity: " + rows[k].label + " exceeds " + rows[k - 1].label);
    }
  }
  double amax = 0.0;
  double amin = kInfinity;
  for (const auto& row : rows) {
    amax = std::max(amax, row.ambient_capacity);
    amin = std::min(amin, row.ambient_capacity);
  }
  report.ambient_spread = amax > 0.0 ? (amax - amin) / amax : 0.0;
  if (report.ambient_spread >= settings.ambient_spread_limit) {
    report.failures.push_back("ambient_capacity: spread exceeds the limit");
  }
  report.upper_minus_lower = rows.back().max_gap;
  report.tolerance = settings.ambient_spread_limit;
  report.resolutive = report.failures.empty();
  return report;
}

LipschitzExtension lipschitz_extend(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                    const std::vector<double>& partial) {
  if (partial.size() != nodes.size()) throw std::invalid_argument("partial data must have one entry per node");
  std::vector<int> support;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (std::isfinite(partial[n])) support.push_back(static_cast<int>(n));
  }
  if (support.empty()) throw std::invalid_argument("Lipschitz extension needs data on at least one node");

  std::map<std::pair<GridId, GridId>, double> cache;
  auto node_distance = [&](int a, int b) {
    const auto& x = nodes[a];
    const auto& y = nodes[b];
    double lo = 0.0;
    if (!x.approach_cells.empty() && !y.approach_cells.empty()) {
      GridId cx = x.approach_cells.front();
      GridId cy = y.approach_cells.front();
      if (cx > cy) std::swap(cx, cy);
      if (cx != cy) {
        auto it = cache.find({cx, cy});
        if (it == cache.end()) it = cache.emplace(std::make_pair(cx, cy), mazurkiewicz_lower(dom, cx, cy)).first;
        lo = it->second;
      }
    }
    return std::max(lo, distance(x.anchor_point, y.anchor_point));
  };

  LipschitzExtension out;
  for (std::size_t s = 0; s < support.size(); ++s) {
    for (std::size_t t = s + 1; t < support.size(); ++t) {
      const double jump = std::abs(partial[support[s]] - partial[support[t]]);
      if (jump == 0.0) continue;
      const double d = node_distance(support[s], support[t]);
      if (!std::isfinite(d)) continue;
      if (d <= 0.0) throw std::invalid_argument("two supported nodes at zero distance carry different values");
      out.lipschitz = std::max(out.lipschitz, jump / d);
    }
  }

  out.values.assign(nodes.size(), kNaN);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (std::isfinite(partial[n])) {
      out.values[n] = partial[n];
      continue;
    }
    double best = kInfinity;
    for (int y : support) {
      const double d = node_distance(static_cast<int>(n), y);
      if (std::isfinite(d)) best = std::min(best, partial[y] + out.lipschitz * d);
    }
    if (std::isfinite(best)) {
      out.values[n] = best;
    } else {
      out.unresolved.push_back(static_cast<int>(n));
    }
  }
  return out;
}

}  // namespace primelab
