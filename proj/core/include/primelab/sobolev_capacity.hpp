#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "primelab/domain.hpp"
#include "primelab/p_energy.hpp"
#include "primelab/prime_end.hpp"

namespace primelab {

/// Real values on grid points (NaN where undefined) and optionally on
/// boundary nodes (NaN for nodes without a value).
struct GridFunction {
  std::uint64_t domain_key = 0;
  std::vector<double> values;
  std::vector<double> node_values;

  /// Defined on the domain cells, `fill` everywhere there.
  static GridFunction on_cells(const GridDomain& dom, double fill);
  /// Defined on every point of the bounding grid.
  static GridFunction on_grid(const GridDomain& dom, double fill);

  bool defined(GridId id) const;
};

/// Throws DomainError when `u` was not built for `dom`.
void check_same_domain(const GridDomain& dom, const GridFunction& u);

struct EnergyReport {
  double lp_term = 0.0;
  double gradient_term = 0.0;
  double norm_p = 0.0;
};

/// Vertex layout of an EnergyGraph built over grid points plus ghost vertices
/// for boundary nodes. Ghost vertices carry no measure and are joined to
/// their node's approach cells by edges of length h.
struct FunctionGraph {
  EnergyGraph graph;
  std::vector<GridId> vertex_point;  // -1 for ghost vertices
  std::vector<int> vertex_node;      // node index for ghost vertices, -1 otherwise
  std::vector<int> vertex_of_point;  // per grid id, -1 when absent
};

/// Graph over the grid points with `include[id] != 0`, edges from the
/// domain's connectivity, plus one ghost vertex per entry of `ghost_nodes`.
FunctionGraph build_function_graph(const GridDomain& dom, const std::vector<std::uint8_t>& include,
                                   const std::vector<BoundaryNode>& nodes, const std::vector<int>& ghost_nodes);

/// Discrete Newtonian norm of u: L^p term over defined points plus the
/// edge-difference upper-gradient term, including ghost edges to nodes with
/// values.
EnergyReport energy(const GridDomain& dom, const GridFunction& u, double p,
                    const std::vector<BoundaryNode>& nodes = {});

enum class CapacityKind { ambient_cp, prime_end_cp };

std::string to_string(CapacityKind kind);

struct CapacityProblem {
  CapacityKind kind = CapacityKind::prime_end_cp;
  double p = 2.0;
  /// Grid points with u >= 1: any bounding-grid point for ambient_cp,
  /// domain cells for prime_end_cp.
  CellSet target_points;
  /// Boundary nodes with u >= 1 (prime_end_cp only), indices into the node list.
  std::vector<int> target_nodes;
  /// Optional points pinned to zero (condenser-type problems).
  CellSet zero_points;
  SolverOptions options;
};

struct CapacityResult {
  double value = 0.0;
  GridFunction minimizer;
  int iterations = 0;
  double residual = 0.0;
};

/// Minimizes the p-th power of the norm over admissible functions. The
/// minimizer is clipped to [0, 1] (which never raises the energy) and
/// `value` is the energy of the clipped function.
CapacityResult capacity(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const CapacityProblem& problem);

/// Prime-end capacity of a cell/node set; zero for the empty set.
double prime_end_capacity(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const PrimeEndSet& set,
                          double p, const SolverOptions& options = {});
/// Ambient capacity of a set of bounding-grid points; zero for the empty set.
double ambient_capacity(const GridDomain& dom, const CellSet& points, double p, const SolverOptions& options = {});

struct CapacityComparison {
  double p = 2.0;
  PrimeEndSet pushed;        // P(E)
  CellSet pulled_back;       // P^-1(P(E))
  double prime_end_of_pushforward = 0.0;  // prime-end capacity of P(E)
  double ambient_of_set = 0.0;            // C_p(E)
  double ambient_of_pullback = 0.0;       // C_p(P^-1(P(E)))
  /// C_p(E) - prime-end capacity of P(E).
  double pushforward_slack = 0.0;
  /// C_p(P^-1(F)) - prime-end capacity of F, with F = P(E).
  double pullback_slack = 0.0;
  bool pushforward_holds = false;
  bool pullback_holds = false;
};

/// Evaluates both transfer inequalities for an ambient set E; a side holds
/// when its slack is >= -tolerance.
CapacityComparison compare_capacities(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                      const CellSet& ambient_set, double p, double tolerance = 1e-6,
                                      const SolverOptions& options = {});

struct AxiomReport {
  std::vector<double> values;
  double union_value = 0.0;
  double subadditivity_slack = 0.0;  // sum of values - union value
  bool subadditive = false;
  /// (i, j, C(E_j) - C(E_i)) for every pair with E_i ⊆ E_j.
  struct Monotone {
    int smaller = 0;
    int larger = 0;
    double slack = 0.0;
  };
  std::vector<Monotone> monotone_pairs;
  bool monotone = false;
  /// C(E_i) - measure(E_i ∩ Ω) per set.
  std::vector<double> measure_slack;
  bool measure_bound = false;
};

AxiomReport capacity_axioms_check(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                  const std::vector<PrimeEndSet>& sets, double p, double tolerance = 1e-6,
                                  const SolverOptions& options = {});

}  // namespace primelab
