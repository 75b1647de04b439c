#include "primelab/sobolev_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace primelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

GridFunction GridFunction::on_cells(const GridDomain& dom, double fill) {
  GridFunction f;
  f.domain_key = dom.fingerprint();
  f.values.assign(dom.point_count(), kNaN);
  for (GridId id : dom.cells()) f.values[id] = fill;
  return f;
}

GridFunction GridFunction::on_grid(const GridDomain& dom, double fill) {
  GridFunction f;
  f.domain_key = dom.fingerprint();
  f.values.assign(dom.point_count(), fill);
  return f;
}

bool GridFunction::defined(GridId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < values.size() && std::isfinite(values[id]);
}

void check_same_domain(const GridDomain& dom, const GridFunction& u) {
  if (u.domain_key != dom.fingerprint() || u.values.size() != dom.point_count()) {
    throw DomainError("grid function belongs to a different domain");
  }
}

FunctionGraph build_function_graph(const GridDomain& dom, const std::vector<std::uint8_t>& include,
                                   const std::vector<BoundaryNode>& nodes, const std::vector<int>& ghost_nodes) {
  FunctionGraph fg;
  fg.vertex_of_point.assign(dom.point_count(), -1);
  const double h = dom.h();
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (include[id] == 0) continue;
    fg.vertex_of_point[id] = static_cast<int>(fg.vertex_point.size());
    fg.vertex_point.push_back(id);
    fg.vertex_node.push_back(-1);
  }
  auto& g = fg.graph;
  g.h = h;
  const bool diagonal = dom.connectivity() == Connectivity::eight;
  const double diag_len = std::sqrt(2.0) * h;
  for (GridId id : fg.vertex_point) {
    const Cell c = dom.cell(id);
    const int a = fg.vertex_of_point[id];
    auto link = [&](Cell q, double len) {
      if (!dom.in_bounds(q)) return;
      const int b = fg.vertex_of_point[dom.id(q)];
      if (b >= 0) g.edges.push_back({a, b, len});
    };
    link({c.i + 1, c.j}, h);
    link({c.i, c.j + 1}, h);
    if (diagonal) {
      link({c.i + 1, c.j + 1}, diag_len);
      link({c.i - 1, c.j + 1}, diag_len);
    }
  }
  for (int n : ghost_nodes) {
    const auto& node = nodes.at(static_cast<std::size_t>(n));
    const int ghost = static_cast<int>(fg.vertex_point.size());
    fg.vertex_point.push_back(-1);
    fg.vertex_node.push_back(n);
    for (GridId c : node.approach_cells) {
      const int b = fg.vertex_of_point[c];
      if (b >= 0) g.edges.push_back({ghost, b, h});
    }
  }
  g.vertex_count = fg.vertex_point.size();
  g.measure.assign(g.vertex_count, 0.0);
  for (std::size_t v = 0; v < g.vertex_count; ++v) {
    if (fg.vertex_point[v] >= 0) g.measure[v] = h * h;
  }
  return fg;
}

EnergyReport energy(const GridDomain& dom, const GridFunction& u, double p, const std::vector<BoundaryNode>& nodes) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  check_same_domain(dom, u);
  std::vector<std::uint8_t> include(dom.point_count(), 0);
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) include[id] = u.defined(id) ? 1 : 0;
  std::vector<int> ghosts;
  if (!u.node_values.empty()) {
    if (u.node_values.size() != nodes.size()) throw std::invalid_argument("node values do not match the node list");
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (std::isfinite(u.node_values[n])) ghosts.push_back(static_cast<int>(n));
    }
  }
  const auto fg = build_function_graph(dom, include, nodes, ghosts);
  std::vector<double> x(fg.graph.vertex_count);
  for (std::size_t v = 0; v < x.size(); ++v) {
    x[v] = fg.vertex_point[v] >= 0 ? u.values[fg.vertex_point[v]] : u.node_values[fg.vertex_node[v]];
  }
  const auto terms = evaluate_energy(fg.graph, p, x, true);
  EnergyReport report;
  report.lp_term = terms.lp;
  report.gradient_term = terms.gradient;
  report.norm_p = std::pow(terms.lp + terms.gradient, 1.0 / p);
  return report;
}

std::string to_string(CapacityKind kind) {
  return kind == CapacityKind::ambient_cp ? "ambient_cp" : "prime_end_cp";
}

CapacityResult capacity(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const CapacityProblem& problem) {
  if (!(problem.p > 1.0)) throw std::invalid_argument("capacity exponent p must exceed 1");
  if (problem.target_points.empty() && problem.target_nodes.empty()) {
    throw std::invalid_argument("capacity target is empty (the capacity of the empty set is 0 by convention)");
  }
  std::vector<std::uint8_t> include(dom.point_count(), 0);
  std::vector<int> ghosts;
  if (problem.kind == CapacityKind::ambient_cp) {
    if (!problem.target_nodes.empty()) throw std::invalid_argument("ambient capacity takes no boundary nodes");
    std::fill(include.begin(), include.end(), 1);
  } else {
    for (GridId id : dom.cells()) include[id] = 1;
    for (GridId id : problem.target_points) {
      if (!dom.inside(id)) throw std::invalid_argument("prime-end capacity targets must be domain cells or nodes");
    }
    for (int n : problem.target_nodes) {
      if (n < 0 || static_cast<std::size_t>(n) >= nodes.size()) throw std::invalid_argument("target node out of range");
    }
    ghosts = problem.target_nodes;
    std::sort(ghosts.begin(), ghosts.end());
    ghosts.erase(std::unique(ghosts.begin(), ghosts.end()), ghosts.end());
  }
  const auto fg = build_function_graph(dom, include, nodes, ghosts);
  std::vector<double> fixed(fg.graph.vertex_count, kNaN);
  for (GridId id : problem.zero_points) {
    if (id >= 0 && static_cast<std::size_t>(id) < dom.point_count() && fg.vertex_of_point[id] >= 0) {
      fixed[fg.vertex_of_point[id]] = 0.0;
    }
  }
  for (GridId id : problem.target_points) {
    if (id >= 0 && static_cast<std::size_t>(id) < dom.point_count() && fg.vertex_of_point[id] >= 0) {
      fixed[fg.vertex_of_point[id]] = 1.0;
    }
  }
  for (std::size_t v = 0; v < fg.graph.vertex_count; ++v) {
    if (fg.vertex_node[v] >= 0) fixed[v] = 1.0;
  }

  auto result = minimize_p_energy(fg.graph, problem.p, fixed, {}, true, problem.options);
  for (double& x : result.u) x = std::clamp(x, 0.0, 1.0);
  const auto terms = evaluate_energy(fg.graph, problem.p, result.u, true);

  CapacityResult out;
  out.value = terms.lp + terms.gradient;
  out.iterations = result.iterations;
  out.residual = result.residual;
  out.minimizer.domain_key = dom.fingerprint();
  out.minimizer.values.assign(dom.point_count(), kNaN);
  if (!ghosts.empty()) out.minimizer.node_values.assign(nodes.size(), kNaN);
  for (std::size_t v = 0; v < fg.graph.vertex_count; ++v) {
    if (fg.vertex_point[v] >= 0) {
      out.minimizer.values[fg.vertex_point[v]] = result.u[v];
    } else {
      out.minimizer.node_values[fg.vertex_node[v]] = result.u[v];
    }
  }
  return out;
}

double prime_end_capacity(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const PrimeEndSet& set,
                          double p, const SolverOptions& options) {
  if (set.empty()) return 0.0;
  CapacityProblem problem;
  problem.kind = CapacityKind::prime_end_cp;
  problem.p = p;
  problem.target_points = set.cells;
  problem.target_nodes = set.nodes;
  problem.options = options;
  return capacity(dom, nodes, problem).value;
}

double ambient_capacity(const GridDomain& dom, const CellSet& points, double p, const SolverOptions& options) {
  if (points.empty()) return 0.0;
  CapacityProblem problem;
  problem.kind = CapacityKind::ambient_cp;
  problem.p = p;
  problem.target_points = points;
  problem.options = options;
  return capacity(dom, {}, problem).value;
}

CapacityComparison compare_capacities(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                      const CellSet& ambient_set, double p, double tolerance,
                                      const SolverOptions& options) {
  CapacityComparison out;
  out.p = p;
  out.pushed = pushforward(dom, nodes, ambient_set);
  out.pulled_back = pullback(nodes, out.pushed);
  out.prime_end_of_pushforward = prime_end_capacity(dom, nodes, out.pushed, p, options);
  out.ambient_of_set = ambient_capacity(dom, ambient_set, p, options);
  out.ambient_of_pullback =
      out.pulled_back == ambient_set ? out.ambient_of_set : ambient_capacity(dom, out.pulled_back, p, options);
  out.pushforward_slack = out.ambient_of_set - out.prime_end_of_pushforward;
  out.pullback_slack = out.ambient_of_pullback - out.prime_end_of_pushforward;
  const double scale = std::max(1.0, out.ambient_of_set);
  out.pushforward_holds = out.pushforward_slack >= -tolerance * scale;
  out.pullback_holds = out.pullback_slack >= -tolerance * scale;
  return out;
}

AxiomReport capacity_axioms_check(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                  const std::vector<PrimeEndSet>& sets, double p, double tolerance,
                                  const SolverOptions& options) {
  if (sets.size() < 2) throw std::invalid_argument("capacity axiom check needs at least two sets");
  AxiomReport report;
  PrimeEndSet all;
  double sum = 0.0;
  for (const auto& s : sets) {
    report.values.push_back(prime_end_capacity(dom, nodes, s, p, options));
    sum += report.values.back();
    all.cells = set_union(all.cells, s.cells);
    std::vector<int> merged;
    std::set_union(all.nodes.begin(), all.nodes.end(), s.nodes.begin(), s.nodes.end(), std::back_inserter(merged));
    all.nodes = std::move(merged);
  }
  report.union_value = prime_end_capacity(dom, nodes, all, p, options);
  report.subadditivity_slack = sum - report.union_value;
  report.subadditive = report.subadditivity_slack >= -tolerance * std::max(1.0, sum);

  report.monotone = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (i == j || !is_subset(sets[i], sets[j])) continue;
      const double slack = report.values[j] - report.values[i];
      report.monotone_pairs.push_back({static_cast<int>(i), static_cast<int>(j), slack});
      if (slack < -tolerance * std::max(1.0, report.values[j])) report.monotone = false;
    }
  }

  report.measure_bound = true;
  const double cell_area = dom.h() * dom.h();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const double mu = static_cast<double>(sets[i].cells.size()) * cell_area;
    report.measure_slack.push_back(report.values[i] - mu);
    if (report.measure_slack.back() < -tolerance * std::max(1.0, mu)) report.measure_bound = false;
  }
  return report;
}

}  // namespace primelab
