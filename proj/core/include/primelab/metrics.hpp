#pragma once

#include <limits>
#include <string>
#include <vector>

#include "primelab/domain.hpp"

namespace primelab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class MetricKind { ambient, inner, mazurkiewicz_bracket };

std::string to_string(MetricKind kind);

/// Per-grid-point distances from a source; complement points and
/// unreachable cells hold infinity.
struct DistanceField {
  CellSet source;
  std::vector<double> values;
  MetricKind kind = MetricKind::inner;
};

/// Certified bracket lo <= d_M <= hi for the Mazurkiewicz distance between
/// two cells, where d_M is the least diameter of a 4-connected cell set
/// containing both.
struct MazBracket {
  double lo = 0.0;
  double hi = 0.0;
  /// Connected cell set containing both endpoints with diameter exactly hi.
  CellSet witness;
};

/// Euclidean diameter of a set of cell centers.
double set_diameter(const GridDomain& dom, const CellSet& cells);

/// Octile shortest-path length inside the mask (8-neighbor moves, weights h
/// and sqrt(2)h; diagonal moves need both side cells inside). Infinity when
/// the cells lie in different components.
double inner_distance(const GridDomain& dom, GridId x, GridId y);

DistanceField inner_distance_field(const GridDomain& dom, GridId source);
DistanceField inner_distance_field(const GridDomain& dom, const CellSet& sources);

DistanceField ambient_distance_field(const GridDomain& dom, GridId source);

/// Mazurkiewicz bracket. `lo` is the exact least radius tau such that x and y
/// are joined inside mask ∩ B(x,tau) ∩ B(y,tau); `hi` is the diameter of the
/// best connected witness found inside that lens. `tol` must be positive and
/// is the resolution the caller asks for; lo is exact so the bracket is always
/// at least that tight at the lower end.
MazBracket mazurkiewicz_distance(const GridDomain& dom, GridId x, GridId y, double tol);

/// Lower Mazurkiewicz bound only (cheap part of the bracket).
double mazurkiewicz_lower(const GridDomain& dom, GridId x, GridId y);

/// Smallest Mazurkiewicz lower bound between the two sets; zero when the sets
/// share a cell or are 4-adjacent.
double maz_separation(const GridDomain& dom, const CellSet& a, const CellSet& b);

/// Cells whose Mazurkiewicz lower bound to some seed is strictly below r.
CellSet maz_neighborhood(const GridDomain& dom, const CellSet& seeds, double r);

}  // namespace primelab
