#include "primelab/experiment.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace primelab {

std::vector<SweepMember> comb_family(DomainKind kind, const std::vector<int>& teeth, double h) {
  if (kind != DomainKind::comb && kind != DomainKind::double_comb) {
    throw std::invalid_argument("comb sweeps take comb or double_comb domains");
  }
  std::vector<SweepMember> family;
  for (int n : teeth) {
    DomainSpec spec;
    spec.kind = kind;
    spec.h = h;
    spec.teeth = n;
    GeneratedDomain g = generate(spec);
    family.push_back({to_string(kind) + "_teeth_" + std::to_string(n), std::move(g.domain), n,
                      static_cast<int>(g.features.size())});
  }
  return family;
}

RegionRule comb_region(DomainKind kind, double h) {
  const double edge = 0.5 * h;
  if (kind == DomainKind::double_comb) {
    return [edge](Point a) { return a.x < edge; };
  }
  return [edge](Point a) { return a.x < edge && a.y < 0.5; };
}

DataRule height_data() {
  return [](const GridDomain&, const BoundaryNode& node) { return node.anchor_point.y; };
}

PerronReport run_comb_sweep(const CombSweepConfig& config) {
  PerturbationSettings settings;
  settings.p = config.p;
  settings.probes = kCombProbes;
  settings.options = config.options;
  return perturbation_experiment(comb_family(config.kind, config.teeth, config.h), height_data(),
                                 comb_region(config.kind, config.h), settings);
}

SlitReport run_slit_experiment(double h, double p, const SolverOptions& options) {
  DomainSpec spec;
  spec.kind = DomainKind::slit;
  spec.h = h;
  const GeneratedDomain g = generate(spec);
  const GridDomain& dom = g.domain;

  SlitReport report;
  report.h = h;
  report.p = p;
  report.nodes = build_boundary_nodes(dom);

  const Segment slit = spec.slit;
  std::map<GridId, SlitAnchorCount> by_anchor;
  for (const auto& node : report.nodes) {
    if (distance_to_segment(node.anchor_point, slit) > 0.5 * h) continue;
    auto& entry = by_anchor[node.anchor];
    entry.anchor = node.anchor;
    entry.point = node.anchor_point;
    ++entry.nodes;
  }
  const GridId tip = dom.id(dom.nearest_point(slit.a));
  for (auto& [anchor, entry] : by_anchor) {
    entry.tip = anchor == tip;
    entry.interior = distance(entry.point, slit.a) > 4.0 * h * (1.0 + 1e-9);
    if (entry.tip) report.tip_nodes = entry.nodes;
    if (entry.interior) {
      ++report.interior_anchors;
      if (entry.nodes == 2) ++report.interior_doubled;
    }
    report.census.push_back(entry);
  }
  report.census_ok =
      report.interior_anchors > 0 && report.interior_doubled == report.interior_anchors && report.tip_nodes == 1;

  const double mid_y = 0.5 * (slit.a.y + slit.b.y);
  DirichletProblem prob;
  prob.nodes = report.nodes;
  prob.p = p;
  prob.options = options;
  for (const auto& node : report.nodes) prob.data.push_back(node.approach_centroid(dom).y > mid_y ? 1.0 : 0.0);
  report.data = prob.data;
  report.solution = solve_dirichlet(dom, prob);

  const Point mid{0.5 * (slit.a.x + slit.b.x), mid_y};
  report.probe_above = {mid.x, mid.y + 2.0 * h};
  report.probe_below = {mid.x, mid.y - 2.0 * h};
  report.value_above = report.solution.values[dom.nearest_cell(report.probe_above)];
  report.value_below = report.solution.values[dom.nearest_cell(report.probe_below)];
  report.sides_ok = report.value_above > 0.9 && report.value_below < 0.1;
  return report;
}

}  // namespace primelab
