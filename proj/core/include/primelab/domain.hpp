#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace primelab {

/// Planar point in domain units.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

/// Grid position (column i, row j) of a sample point of the bounding grid.
struct Cell {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Connectivity { four = 4, eight = 8 };

/// Linear index of a bounding-grid point, `i + nx * j`.
using GridId = std::int32_t;

/// Sorted, duplicate-free list of grid ids.
using CellSet = std::vector<GridId>;

CellSet make_cell_set(std::vector<GridId> ids);
bool is_subset(const CellSet& sub, const CellSet& super);
CellSet set_union(const CellSet& a, const CellSet& b);
CellSet set_intersection(const CellSet& a, const CellSet& b);

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bounded open connected set sampled on a uniform grid.
///
/// Sample points sit at `origin + (i*h, j*h)`. A point is a cell of the
/// domain when its mask bit is set; every other point of the bounding
/// grid belongs to the complement. Measure is counting measure times h^2.
class GridDomain {
 public:
  GridDomain(int nx, int ny, double h, Point origin, std::vector<std::uint8_t> mask,
             Connectivity connectivity = Connectivity::four);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  Point origin() const { return origin_; }
  Connectivity connectivity() const { return connectivity_; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  std::size_t point_count() const { return mask_.size(); }
  std::size_t cell_count() const { return cells_.size(); }
  /// All true cells in increasing id order.
  const CellSet& cells() const { return cells_; }

  bool in_bounds(Cell c) const { return c.i >= 0 && c.j >= 0 && c.i < nx_ && c.j < ny_; }
  bool inside(GridId id) const { return id >= 0 && id < static_cast<GridId>(mask_.size()) && mask_[id] != 0; }
  bool inside(Cell c) const { return in_bounds(c) && mask_[id(c)] != 0; }

  GridId id(Cell c) const { return c.i + nx_ * c.j; }
  Cell cell(GridId id) const { return {id % nx_, id / nx_}; }
  Point center(GridId id) const;
  Point center(Cell c) const;

  /// Area of the domain, `cell_count() * h^2`.
  double measure() const;

  /// Nearest grid point to `p` (clamped to the bounding grid).
  Cell nearest_point(Point p) const;
  /// Nearest true cell to `p`; ties go to the lowest id.
  GridId nearest_cell(Point p) const;

  /// Grid neighbors of `id` regardless of mask, for the given connectivity.
  void grid_neighbors(GridId id, Connectivity conn, std::vector<GridId>& out) const;

  /// Stable 64-bit fingerprint of (nx, ny, h, origin, mask).
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  int nx_;
  int ny_;
  double h_;
  Point origin_;
  std::vector<std::uint8_t> mask_;
  Connectivity connectivity_;
  CellSet cells_;
  std::uint64_t fingerprint_ = 0;
};

/// Connected components of the true cells under `conn`; component label per
/// grid id (-1 for complement points). Labels are ordered by smallest id.
std::vector<int> label_components(const GridDomain& dom, Connectivity conn, int* count = nullptr);

/// Connected components of an arbitrary subset of cells. Returns one CellSet
/// per component, ordered by smallest member.
std::vector<CellSet> split_components(const GridDomain& dom, const CellSet& cells, Connectivity conn);

bool is_connected(const GridDomain& dom, const CellSet& cells, Connectivity conn);

/// Complement points 4-adjacent to at least one true cell.
CellSet boundary_anchors(const GridDomain& dom);

/// True cells 4-adjacent to some complement point.
bool touches_boundary(const GridDomain& dom, const CellSet& cells);

enum class DomainKind { square, comb, double_comb, slit, annulus, custom };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct Segment {
  Point a;
  Point b;
};

double distance_to_segment(Point p, const Segment& s);

struct DomainSpec {
  DomainKind kind = DomainKind::square;
  double h = 1.0 / 32.0;
  Connectivity connectivity = Connectivity::four;
  /// comb / double_comb: number of tooth indices n = 2 .. teeth + 1.
  int teeth = 4;
  /// slit: removed segment (defaults to [1/2, 1) x {1/2}).
  Segment slit{{0.5, 0.5}, {1.0, 0.5}};
  /// annulus radii and center.
  double r_inner = 0.25;
  double r_outer = 0.5;
  Point center{0.5, 0.5};
  /// custom: rows from top (largest y) to bottom, '1' or '#' = inside.
  std::vector<std::string> rows;
};

struct ClippedFeature {
  std::string feature;
  int index = 0;
  Segment segment;
  std::string reason;
};

struct GeneratedDomain {
  GridDomain domain;
  std::vector<ClippedFeature> clipped;
  /// Removed segments that survived clipping.
  std::vector<Segment> features;
};

GeneratedDomain generate(const DomainSpec& spec);

/// True cells adjacent to `c` under the domain's connectivity.
std::vector<GridId> cell_neighbors(const GridDomain& dom, GridId c);

/// True cells whose center lies within Euclidean distance `r` of a center in `seeds`.
CellSet neighborhood(const GridDomain& dom, const CellSet& seeds, double r);

/// Tooth segments of the harmonic comb for n = 2 .. teeth + 1.
std::vector<Segment> comb_teeth(int teeth);
/// Tooth segments of the double comb for n = 2 .. teeth + 1, two per n.
std::vector<Segment> double_comb_teeth(int teeth);

}  // namespace primelab
