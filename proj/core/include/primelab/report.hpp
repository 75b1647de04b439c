#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "primelab/domain.hpp"
#include "primelab/experiment.hpp"
#include "primelab/metrics.hpp"
#include "primelab/prime_end.hpp"
#include "primelab/sobolev_capacity.hpp"
#include "primelab/solver.hpp"

namespace primelab {

/// Library version from git describe at configure time.
std::string version_string();

/// Configuration embedded in every artifact.
struct ArtifactMeta {
  std::string command;
  double h = 0.0;
  double p = 0.0;  // 0 when the artifact has no exponent
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string version = version_string();
  std::string domain;  // canonical domain spec JSON, may be empty
};

/// "key=value" lines, used as comment headers in CSV/PBM/SVG files.
std::string meta_lines(const ArtifactMeta& meta);

std::string clipping_json(const GeneratedDomain& g, const ArtifactMeta& meta);
std::string distance_csv(const GridDomain& dom, const DistanceField& field, const ArtifactMeta& meta);
std::string bracket_json(const GridDomain& dom, GridId x, GridId y, const MazBracket& b, double inner,
                         const ArtifactMeta& meta);
std::string nodes_json(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const ArtifactMeta& meta);
std::string chain_json(const GridDomain& dom, const Chain& chain, const ArtifactMeta& meta);
std::string capacity_json(CapacityKind kind, const CapacityResult& result, const ArtifactMeta& meta);
/// One row per grid point where u is defined: i, j, x, y, value.
std::string field_csv(const GridDomain& dom, const GridFunction& u, const ArtifactMeta& meta);
std::string perron_json(const PerronReport& report, const ArtifactMeta& meta);
/// Gap-vs-resolution table of a sweep.
std::string sweep_csv(const PerronReport& report, const ArtifactMeta& meta);
std::string slit_json(const GridDomain& dom, const SlitReport& report, const ArtifactMeta& meta);
/// Heatmap of u over the bounding grid (undefined points left blank).
std::string heatmap_svg(const GridDomain& dom, const GridFunction& u, const std::string& title,
                        const ArtifactMeta& meta);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace primelab
