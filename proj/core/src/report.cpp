#include "primelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace primelab {

namespace {

using nlohmann::ordered_json;

// Shortest round-trip decimal form, so artifacts are bit-stable and exact.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinity; it is written as null.
ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json meta_json(const ArtifactMeta& meta) {
  ordered_json j;
  j["command"] = meta.command;
  j["h"] = meta.h;
  j["p"] = jnum(meta.p);
  j["tolerance"] = meta.tolerance;
  j["seed"] = meta.seed;
  j["version"] = meta.version;
  if (!meta.domain.empty()) j["domain"] = ordered_json::parse(meta.domain);
  return j;
}

ordered_json cell_json(const GridDomain& dom, GridId id) {
  const Cell c = dom.cell(id);
  const Point p = dom.center(id);
  return {{"i", c.i}, {"j", c.j}, {"x", p.x}, {"y", p.y}};
}

ordered_json cells_json(const GridDomain& dom, const CellSet& set) {
  ordered_json arr = ordered_json::array();
  for (GridId id : set) {
    const Cell c = dom.cell(id);
    arr.push_back({c.i, c.j});
  }
  return arr;
}

std::string csv_header(const ArtifactMeta& meta) {
  std::string out;
  std::istringstream lines(meta_lines(meta));
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  return out;
}

}  // namespace

std::string version_string() {
#ifdef PRIMELAB_VERSION_STRING
  return PRIMELAB_VERSION_STRING;
#else
  return "unknown";
#endif
}

std::string meta_lines(const ArtifactMeta& meta) {
  std::ostringstream out;
  out << "command=" << meta.command << "\n";
  out << "h=" << num(meta.h) << "\n";
  out << "p=" << num(meta.p) << "\n";
  out << "tolerance=" << num(meta.tolerance) << "\n";
  out << "seed=" << meta.seed << "\n";
  out << "version=" << meta.version << "\n";
  if (!meta.domain.empty()) out << "domain=" << ordered_json::parse(meta.domain).dump() << "\n";
  return out.str();
}

std::string clipping_json(const GeneratedDomain& g, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["nx"] = g.domain.nx();
  j["ny"] = g.domain.ny();
  j["cells"] = g.domain.cell_count();
  j["fingerprint"] = g.domain.fingerprint();
  ordered_json kept = ordered_json::array();
  for (const auto& s : g.features) kept.push_back({{s.a.x, s.a.y}, {s.b.x, s.b.y}});
  j["features"] = kept;
  ordered_json clipped = ordered_json::array();
  for (const auto& c : g.clipped) {
    clipped.push_back({{"feature", c.feature},
                       {"index", c.index},
                       {"segment", {{c.segment.a.x, c.segment.a.y}, {c.segment.b.x, c.segment.b.y}}},
                       {"reason", c.reason}});
  }
  j["clipped"] = clipped;
  return j.dump(2) + "\n";
}

std::string distance_csv(const GridDomain& dom, const DistanceField& field, const ArtifactMeta& meta) {
  std::string out = csv_header(meta);
  out += "# metric=" + to_string(field.kind) + "\n";
  out += "i,j,x,y,distance\n";
  for (GridId id : dom.cells()) {
    const Cell c = dom.cell(id);
    const Point p = dom.center(id);
    out += std::to_string(c.i) + "," + std::to_string(c.j) + "," + num(p.x) + "," + num(p.y) + "," +
           num(field.values[id]) + "\n";
  }
  return out;
}

std::string bracket_json(const GridDomain& dom, GridId x, GridId y, const MazBracket& b, double inner,
                         const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["from"] = cell_json(dom, x);
  j["to"] = cell_json(dom, y);
  j["euclidean"] = distance(dom.center(x), dom.center(y));
  j["inner"] = jnum(inner);
  j["lo"] = jnum(b.lo);
  j["hi"] = jnum(b.hi);
  j["witness_size"] = b.witness.size();
  j["witness"] = cells_json(dom, b.witness);
  return j.dump(2) + "\n";
}

std::string nodes_json(const GridDomain& dom, const std::vector<BoundaryNode>& nodes, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  int resolved = 0;
  ordered_json arr = ordered_json::array();
  for (const auto& n : nodes) {
    if (n.resolved) ++resolved;
    const Point c = n.approach_centroid(dom);
    arr.push_back({{"anchor", cell_json(dom, n.anchor)},
                   {"approach_id", n.approach_id},
                   {"resolved", n.resolved},
                   {"stable_radius", n.stable_radius},
                   {"approach_centroid", {c.x, c.y}},
                   {"approach_cells", cells_json(dom, n.approach_cells)}});
  }
  j["node_count"] = nodes.size();
  j["resolved_count"] = resolved;
  j["nodes"] = arr;
  return j.dump(2) + "\n";
}

std::string chain_json(const GridDomain& dom, const Chain& chain, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  ordered_json levels = ordered_json::array();
  for (const auto& level : chain.levels) {
    levels.push_back({{"size", level.size()}, {"diameter", set_diameter(dom, level)}, {"cells", cells_json(dom, level)}});
  }
  j["levels"] = levels;
  ordered_json seps = ordered_json::array();
  for (double s : chain.separations) seps.push_back(jnum(s));
  j["separations"] = seps;
  j["impression"] = cells_json(dom, chain.impression);
  j["singleton"] = chain.impression.size() == 1;
  return j.dump(2) + "\n";
}

std::string capacity_json(CapacityKind kind, const CapacityResult& result, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["kind"] = to_string(kind);
  j["p"] = meta.p;
  j["value"] = result.value;
  j["iterations"] = result.iterations;
  j["residual"] = result.residual;
  return j.dump(2) + "\n";
}

std::string field_csv(const GridDomain& dom, const GridFunction& u, const ArtifactMeta& meta) {
  check_same_domain(dom, u);
  std::string out = csv_header(meta);
  out += "i,j,x,y,value\n";
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (!u.defined(id)) continue;
    const Cell c = dom.cell(id);
    const Point p = dom.center(id);
    out += std::to_string(c.i) + "," + std::to_string(c.j) + "," + num(p.x) + "," + num(p.y) + "," +
           num(u.values[id]) + "\n";
  }
  return out;
}

std::string perron_json(const PerronReport& report, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["upper_minus_lower"] = report.upper_minus_lower;
  j["resolutive"] = report.resolutive;
  j["tolerance"] = report.tolerance;
  j["unresolved_nodes"] = report.unresolved_nodes;
  if (!report.perturbation_gaps.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.perturbation_gaps) {
      ordered_json probes = ordered_json::array();
      for (std::size_t q = 0; q < r.probes.size(); ++q) {
        probes.push_back({{"x", r.probes[q].x},
                          {"y", r.probes[q].y},
                          {"gap", r.probe_gaps[q]},
                          {"log10_gap", jnum(r.probe_log10_gaps[q])}});
      }
      rows.push_back({{"label", r.label},
                      {"h", r.h},
                      {"teeth", r.teeth},
                      {"retained_features", r.retained_features},
                      {"perturbed_nodes", r.perturbed_nodes},
                      {"probes", probes},
                      {"max_gap", r.max_gap},
                      {"prime_end_capacity", r.prime_end_capacity},
                      {"ambient_capacity", r.ambient_capacity}});
    }
    j["perturbation_gaps"] = rows;
    j["gaps_decreasing"] = report.gaps_decreasing;
    j["capacity_nonincreasing"] = report.capacity_nonincreasing;
    j["ambient_spread"] = report.ambient_spread;
    j["failures"] = report.failures;
  }
  return j.dump(2) + "\n";
}

std::string sweep_csv(const PerronReport& report, const ArtifactMeta& meta) {
  std::string out = csv_header(meta);
  out += "label,h,teeth,retained_features,perturbed_nodes";
  const std::size_t probes = report.perturbation_gaps.empty() ? 0 : report.perturbation_gaps.front().probes.size();
  for (std::size_t q = 0; q < probes; ++q) out += ",probe_gap_" + std::to_string(q);
  for (std::size_t q = 0; q < probes; ++q) out += ",probe_log10_gap_" + std::to_string(q);
  out += ",max_gap,prime_end_capacity,ambient_capacity\n";
  for (const auto& r : report.perturbation_gaps) {
    out += r.label + "," + num(r.h) + "," + std::to_string(r.teeth) + "," + std::to_string(r.retained_features) + "," +
           std::to_string(r.perturbed_nodes);
    for (double g : r.probe_gaps) out += "," + num(g);
    for (double g : r.probe_log10_gaps) out += "," + num(g);
    out += "," + num(r.max_gap) + "," + num(r.prime_end_capacity) + "," + num(r.ambient_capacity) + "\n";
  }
  return out;
}

std::string slit_json(const GridDomain& dom, const SlitReport& report, const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  ordered_json census = ordered_json::array();
  for (const auto& c : report.census) {
    census.push_back({{"anchor", cell_json(dom, c.anchor)}, {"nodes", c.nodes}, {"tip", c.tip}, {"interior", c.interior}});
  }
  j["census"] = census;
  j["interior_anchors"] = report.interior_anchors;
  j["interior_doubled"] = report.interior_doubled;
  j["tip_nodes"] = report.tip_nodes;
  j["census_ok"] = report.census_ok;
  j["probe_above"] = {{"x", report.probe_above.x}, {"y", report.probe_above.y}, {"value", report.value_above}};
  j["probe_below"] = {{"x", report.probe_below.x}, {"y", report.probe_below.y}, {"value", report.value_below}};
  j["sides_ok"] = report.sides_ok;
  return j.dump(2) + "\n";
}

std::string heatmap_svg(const GridDomain& dom, const GridFunction& u, const std::string& title,
                        const ArtifactMeta& meta) {
  check_same_domain(dom, u);
  double lo = kInfinity;
  double hi = -kInfinity;
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (!u.defined(id)) continue;
    lo = std::min(lo, u.values[id]);
    hi = std::max(hi, u.values[id]);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const int px = std::max(1, 512 / std::max(dom.nx(), dom.ny()));
  const int width = px * dom.nx();
  const int height = px * dom.ny();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height + 20
      << "\" viewBox=\"0 0 " << width << " " << height + 20 << "\">\n";
  out << "<metadata>\n" << meta_lines(meta) << "range=" << num(lo) << "," << num(hi) << "\n</metadata>\n";
  out << "<title>" << title << "</title>\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#202020\"/>\n";
  for (int j = 0; j < dom.ny(); ++j) {
    for (int i = 0; i < dom.nx(); ++i) {
      const GridId id = dom.id(Cell{i, j});
      if (!u.defined(id)) continue;
      const double t = (u.values[id] - lo) / (hi - lo);
      // Blue-to-red ramp through white.
      const int r = static_cast<int>(std::lround(255.0 * std::min(1.0, 2.0 * t)));
      const int b = static_cast<int>(std::lround(255.0 * std::min(1.0, 2.0 * (1.0 - t))));
      const int g = std::min(r, b);
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
      out << "<rect x=\"" << i * px << "\" y=\"" << (dom.ny() - 1 - j) * px << "\" width=\"" << px << "\" height=\""
          << px << "\" fill=\"" << color << "\"/>\n";
    }
  }
  out << "<text x=\"2\" y=\"" << height + 15 << "\" font-size=\"12\" fill=\"black\">" << title << " ["
      << num(lo) << ", " << num(hi) << "]</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace primelab
