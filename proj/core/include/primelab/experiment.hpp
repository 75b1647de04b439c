#pragma once

#include <string>
#include <vector>

#include "primelab/domain.hpp"
#include "primelab/solver.hpp"

namespace primelab {

/// Probes shared by the comb sweeps, in domain-relative coordinates.
inline const std::vector<Point> kCombProbes{{0.5, 0.75}, {0.5, 0.25}};

struct CombSweepConfig {
  DomainKind kind = DomainKind::comb;  // comb or double_comb
  std::vector<int> teeth{4, 8, 16};
  double h = 1.0 / 256.0;
  double p = 2.0;
  SolverOptions options;
};

/// Comb-family domains at a common h, one per tooth count.
std::vector<SweepMember> comb_family(DomainKind kind, const std::vector<int>& teeth, double h);

/// Perturbation set of the canned sweeps: the lower half of the left edge
/// for the comb, the whole left edge for the double comb.
RegionRule comb_region(DomainKind kind, double h);

/// Data f = y at every node.
DataRule height_data();

/// Runs the comb or double-comb stability sweep.
PerronReport run_comb_sweep(const CombSweepConfig& config);

struct SlitAnchorCount {
  GridId anchor = -1;
  Point point;
  int nodes = 0;
  bool tip = false;
  bool interior = false;  // farther than 4h from the tip
};

struct SlitReport {
  double h = 0.0;
  double p = 2.0;
  std::vector<SlitAnchorCount> census;
  int interior_anchors = 0;
  int interior_doubled = 0;
  int tip_nodes = 0;
  Point probe_above;
  Point probe_below;
  double value_above = 0.0;
  double value_below = 0.0;
  bool census_ok = false;
  bool sides_ok = false;
  GridFunction solution;
  std::vector<BoundaryNode> nodes;
  std::vector<double> data;
};

/// Slit fixture: node census along the slit and a solve with data 1 on nodes
/// approached from above and 0 on nodes approached from below.
SlitReport run_slit_experiment(double h, double p, const SolverOptions& options = {});

}  // namespace primelab
