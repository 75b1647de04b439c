#pragma once

#include <functional>
#include <string>
#include <vector>

#include "primelab/domain.hpp"
#include "primelab/p_energy.hpp"
#include "primelab/prime_end.hpp"
#include "primelab/sobolev_capacity.hpp"

namespace primelab {

/// Boundary-value problem with data on boundary nodes. A NaN datum leaves
/// the node free, as do unresolved nodes; only resolved nodes with finite
/// data constrain the solution.
struct DirichletProblem {
  std::vector<BoundaryNode> nodes;
  std::vector<double> data;  // one entry per node
  double p = 2.0;
  SolverOptions options;
  /// Optional starting iterate (values per grid id; empty for none).
  std::vector<double> initial_guess;
};

/// Throws std::invalid_argument when the problem is malformed or has no
/// resolved node carrying data.
void validate(const DirichletProblem& prob);

/// Hf: minimizer of the edge p-energy over the domain cells, with node data
/// held on ghost vertices wired to each node's approach cells. The result is
/// defined on the cells and carries the constrained node values.
GridFunction solve_dirichlet(const GridDomain& dom, const DirichletProblem& prob);

/// Obstacle problem: same energy restricted to u >= psi on the cells. psi
/// holds values per grid id; NaN or -infinity mean no obstacle there.
struct ObstacleProblem {
  DirichletProblem base;
  GridFunction psi;
};

/// Throws DomainError naming a cell where psi = +infinity (no admissible u).
GridFunction solve_obstacle(const GridDomain& dom, const ObstacleProblem& prob);

/// w = H(f + delta) - H(f) on the cells.
struct DifferenceField {
  GridFunction value;             // w rounded to double (0 where it underflows)
  std::vector<double> log10_abs;  // log10 |w| per grid id, NaN off the cells
};

/// H(f + delta) - H(f), with `delta` given per node (ignored on nodes that
/// carry no constraint). Solved for the difference directly so that values
/// far below the round-off level of Hf itself stay resolved.
DifferenceField perturbation_difference(const GridDomain& dom, const DirichletProblem& prob,
                                        const std::vector<double>& delta);

struct ComparisonReport {
  /// max over cells of v - u (negative when v lies strictly below u).
  double max_violation = 0.0;
  GridId location = -1;
  /// max over nodes carrying both values of v - u.
  double node_violation = 0.0;
  bool holds = false;
};

/// Checks v <= u + tol on every cell where both are defined.
ComparisonReport comparison_check(const GridDomain& dom, const GridFunction& u, const GridFunction& v,
                                  double tol);

struct PerturbationRow {
  std::string label;
  double h = 0.0;
  int teeth = 0;
  int retained_features = 0;
  std::vector<Point> probes;
  std::vector<double> probe_gaps;     // |u_f - u_{f+chi_E}| at each probe
  std::vector<double> probe_log10_gaps;  // log10 of the same, exact below the double range
  double max_gap = 0.0;               // over all cells
  double prime_end_capacity = 0.0;    // capacity of P(E)
  double ambient_capacity = 0.0;      // C_p(E)
  int perturbed_nodes = 0;
  GridFunction difference;            // |u_f - u_{f+chi_E}| per cell
};

struct PerronReport {
  double tolerance = 0.0;
  double upper_minus_lower = 0.0;
  bool resolutive = false;
  GridId location = -1;
  int unresolved_nodes = 0;
  GridFunction solution;  // Hf
  GridFunction upper;
  GridFunction lower;
  std::vector<PerturbationRow> perturbation_gaps;
  /// Sweep verdicts (perturbation_experiment only).
  bool gaps_decreasing = true;
  bool capacity_nonincreasing = true;
  double ambient_spread = 0.0;  // (max - min) / max of the C_p(E) column
  std::vector<std::string> failures;
};

/// Discrete Perron envelopes. Unresolved nodes receive data from their
/// resolved neighbours within 4h, raised (upper) or lowered (lower) by tol,
/// and the envelopes are obstacle solves against Hf so that
/// lower <= Hf <= upper holds cellwise. tol <= 0 selects tol = h.
PerronReport perron_gap(const GridDomain& dom, const DirichletProblem& prob, double tol = 0.0);

struct SweepMember {
  std::string label;
  GridDomain domain;
  int teeth = 0;
  int retained_features = 0;
};

/// Datum per node (return NaN to leave a node free).
using DataRule = std::function<double(const GridDomain&, const BoundaryNode&)>;
/// Membership of an ambient boundary point in the perturbation set E.
using RegionRule = std::function<bool(Point)>;

struct PerturbationSettings {
  double p = 2.0;
  std::vector<Point> probes;
  SolverOptions options;
  /// Allowed relative spread of the C_p(E) column.
  double ambient_spread_limit = 0.1;
  /// Relative slack in the non-increasing capacity check.
  double capacity_tolerance = 1e-9;
};

/// For each member solves with data f and with f + chi_E (the indicator added
/// at resolved nodes anchored in E), records the probe gaps and both
/// capacities of E, and evaluates the sweep trends in member order.
PerronReport perturbation_experiment(const std::vector<SweepMember>& family, const DataRule& f, const RegionRule& region,
                                     const PerturbationSettings& settings);

struct LipschitzExtension {
  std::vector<double> values;  // per node, NaN for flagged nodes
  double lipschitz = 0.0;
  std::vector<int> unresolved;  // nodes at infinite distance from the support
};

/// McShane extension F(x) = min_y f(y) + L d(x, y) over the support of f,
/// with L the least constant consistent with the given values. The node
/// distance d is the larger of the Mazurkiewicz lower bound between the
/// first approach cells and the Euclidean anchor distance, both of which
/// bound the Mazurkiewicz distance from below.
LipschitzExtension lipschitz_extend(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                    const std::vector<double>& partial);

}  // namespace primelab
