#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "primelab/domain.hpp"

namespace primelab {

/// One point of the discrete Mazurkiewicz boundary: a complement point
/// (anchor) together with one local approach component of the domain.
struct BoundaryNode {
  GridId anchor = -1;
  Point anchor_point;
  /// Index of this node among the nodes sharing its anchor.
  int approach_id = 0;
  /// Smallest probe radius from which the local component count stays fixed.
  double stable_radius = 0.0;
  /// False when the component count still changes at the largest probe radius.
  bool resolved = true;
  /// Domain cells 4-adjacent to the anchor reached through this component.
  CellSet approach_cells;
  /// Component of mask ∩ B(anchor, 4h) that carries the approach cells.
  CellSet approach_component;

  /// Mean position of the approach cells; tells the sides of a slit apart.
  Point approach_centroid(const GridDomain& dom) const;
};

/// Probe radii, in units of h, used to count local approach components.
inline constexpr double kNodeProbeRadii[3] = {2.0, 3.0, 4.0};

/// All boundary nodes, ordered by anchor id and approach id. Anchors whose
/// count is unstable produce one node flagged `resolved = false`.
std::vector<BoundaryNode> build_boundary_nodes(const GridDomain& dom);

/// Nodes with `resolved == true`.
std::vector<BoundaryNode> resolved_nodes(const std::vector<BoundaryNode>& nodes);

class ChainError : public std::runtime_error {
 public:
  ChainError(int level, char condition, const std::string& what)
      : std::runtime_error(what), level_(level), condition_(condition) {}
  int level() const { return level_; }
  /// 'a' nesting / acceptability, 'b' separation, 'c' impression, 'p' precondition.
  char condition() const { return condition_; }

 private:
  int level_;
  char condition_;
};

/// Finite-depth chain E_1 ⊇ E_2 ⊇ ... ⊇ E_K of acceptable sets.
struct Chain {
  std::vector<CellSet> levels;
  /// Mazurkiewicz separation of consecutive relative boundaries (size K-1).
  std::vector<double> separations;
  /// Complement anchors 4-adjacent to the deepest level.
  CellSet impression;
};

/// Cells of `set` that are 4-adjacent to a domain cell outside `set`.
CellSet relative_boundary(const GridDomain& dom, const CellSet& set);

/// Checks nesting and acceptability (a), positive separation (b) and a
/// nonempty impression (c); throws ChainError naming the first failure.
Chain validate_chain(const GridDomain& dom, std::vector<CellSet> levels);

/// True iff every level of `b` contains some level of `a`.
bool divides(const Chain& a, const Chain& b);
bool equivalent(const Chain& a, const Chain& b);

/// Chain generated by a polyline curve ending at the boundary. Each polyline
/// vertex is one parameter unit, so tail k is the part of the curve from
/// vertex k on. Levels are components of Mazurkiewicz neighborhoods of the
/// tails with radii shrinking toward the last tail, which is kept bare.
Chain chain_of_curve(const GridDomain& dom, const std::vector<Point>& polyline);

/// Rasterized 4-connected cell path of a polyline, cut at the first
/// complement point it meets.
std::vector<GridId> rasterize_polyline(const GridDomain& dom, const std::vector<Point>& polyline);

/// Nested approach components of a node at radii 8h, 4h and ~h.
Chain node_chain(const GridDomain& dom, const BoundaryNode& node);

struct End {
  Chain representative;
  bool singleton = false;
  std::optional<BoundaryNode> node;
};

End make_end(const GridDomain& dom, Chain chain, const std::vector<BoundaryNode>& nodes);

/// Cells plus boundary nodes (indices into a node list).
struct PrimeEndSet {
  CellSet cells;
  std::vector<int> nodes;

  bool empty() const { return cells.empty() && nodes.empty(); }
  friend bool operator==(const PrimeEndSet&, const PrimeEndSet&) = default;
};

bool is_subset(const PrimeEndSet& sub, const PrimeEndSet& super);

/// P(E): the domain cells of E plus every resolved node anchored in E.
PrimeEndSet pushforward(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const CellSet& ambient);

/// P^-1(F): the cells of F plus the anchors of its nodes.
CellSet pullback(const std::vector<BoundaryNode>& nodes, const PrimeEndSet& set);

struct DensityLevel {
  int level = 0;
  int nodes_inside = 0;
  /// Distance from the chain's impression to the nearest node whose approach
  /// cells meet the level; infinity when no node does.
  double nearest_node_distance = 0.0;
};

struct DensityReport {
  std::vector<std::vector<DensityLevel>> chains;
  bool all_finite = true;
};

DensityReport density_diagnostic(const GridDomain& dom, const std::vector<BoundaryNode>& nodes,
                                 const std::vector<Chain>& chains);

}  // namespace primelab
