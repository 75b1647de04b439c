#include "primelab/grid_io.hpp"

#include <set>
#include <sstream>

#include "json.hpp"

namespace primelab {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(key, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Point point_field(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(key, "field '" + key + "' must be a pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

DomainSpec parse_domain_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("domain spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "domain spec must be a JSON object");
  static const std::set<std::string> known{"kind", "h", "connectivity", "teeth", "slit",
                                           "r_inner", "r_outer", "center", "rows"};
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) throw ConfigError(key, "unknown field '" + key + "'");
  }
  DomainSpec spec;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("kind", "field 'kind' must be a string");
  try {
    spec.kind = domain_kind_from_string(j["kind"].get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError("kind", e.what());
  }
  if (!j.contains("h")) throw ConfigError("h", "field 'h' is required");
  spec.h = number_field(j, "h");
  if (!(spec.h > 0.0)) throw ConfigError("h", "field 'h' must be positive");
  if (j.contains("connectivity")) {
    const auto& c = j["connectivity"];
    if (!c.is_number_integer() || (c.get<int>() != 4 && c.get<int>() != 8)) {
      throw ConfigError("connectivity", "field 'connectivity' must be 4 or 8");
    }
    spec.connectivity = c.get<int>() == 4 ? Connectivity::four : Connectivity::eight;
  }
  if (j.contains("teeth")) {
    const auto& t = j["teeth"];
    if (!t.is_number_integer() || t.get<int>() < 1) throw ConfigError("teeth", "field 'teeth' must be a positive integer");
    spec.teeth = t.get<int>();
  }
  if (j.contains("slit")) {
    const auto& s = j["slit"];
    if (!s.is_array() || s.size() != 2) throw ConfigError("slit", "field 'slit' must hold two points");
    spec.slit = {point_field(s[0], "slit"), point_field(s[1], "slit")};
  }
  if (j.contains("r_inner")) spec.r_inner = number_field(j, "r_inner");
  if (j.contains("r_outer")) spec.r_outer = number_field(j, "r_outer");
  if (j.contains("center")) spec.center = point_field(j["center"], "center");
  if (spec.kind == DomainKind::annulus && !(0.0 < spec.r_inner && spec.r_inner < spec.r_outer)) {
    throw ConfigError("r_inner", "annulus radii must satisfy 0 < r_inner < r_outer");
  }
  if (j.contains("rows")) {
    const auto& rows = j["rows"];
    if (!rows.is_array()) throw ConfigError("rows", "field 'rows' must be an array of strings");
    for (const auto& r : rows) {
      if (!r.is_string()) throw ConfigError("rows", "field 'rows' must be an array of strings");
      spec.rows.push_back(r.get<std::string>());
    }
  }
  if (spec.kind == DomainKind::custom && spec.rows.empty()) {
    throw ConfigError("rows", "custom domains need field 'rows'");
  }
  return spec;
}

std::string domain_spec_json(const DomainSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["h"] = spec.h;
  j["connectivity"] = spec.connectivity == Connectivity::four ? 4 : 8;
  switch (spec.kind) {
    case DomainKind::comb:
    case DomainKind::double_comb: j["teeth"] = spec.teeth; break;
    case DomainKind::slit:
      j["slit"] = {{spec.slit.a.x, spec.slit.a.y}, {spec.slit.b.x, spec.slit.b.y}};
      break;
    case DomainKind::annulus:
      j["r_inner"] = spec.r_inner;
      j["r_outer"] = spec.r_outer;
      j["center"] = {spec.center.x, spec.center.y};
      break;
    case DomainKind::custom: j["rows"] = spec.rows; break;
    default: break;
  }
  return j.dump(2);
}

std::string mask_pbm(const GridDomain& dom, const std::string& comments) {
  std::ostringstream out;
  out << "P1\n";
  std::istringstream lines(comments);
  for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
  out << dom.nx() << " " << dom.ny() << "\n";
  for (int j = dom.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < dom.nx(); ++i) out << (i > 0 ? " " : "") << (dom.inside(Cell{i, j}) ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

DomainSpec spec_from_pbm(const std::string& text, double h) {
  std::istringstream in(text);
  std::string token;
  auto next = [&]() {
    while (in >> token) {
      if (token[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return true;
    }
    return false;
  };
  if (!next() || token != "P1") throw ConfigError("mask", "mask must start with the P1 magic");
  int nx = 0;
  int ny = 0;
  if (!next()) throw ConfigError("mask", "mask is missing its width");
  nx = std::stoi(token);
  if (!next()) throw ConfigError("mask", "mask is missing its height");
  ny = std::stoi(token);
  if (nx <= 0 || ny <= 0) throw ConfigError("mask", "mask dimensions must be positive");
  DomainSpec spec;
  spec.kind = DomainKind::custom;
  spec.h = h;
  for (int r = 0; r < ny; ++r) {
    std::string row;
    while (static_cast<int>(row.size()) < nx) {
      if (!next()) throw ConfigError("mask", "mask ends before all rows were read");
      for (char c : token) {
        if (c != '0' && c != '1') throw ConfigError("mask", std::string("mask contains invalid character '") + c + "'");
        row.push_back(c);
      }
    }
    if (static_cast<int>(row.size()) != nx) throw ConfigError("mask", "mask row is longer than the width");
    spec.rows.push_back(row);
  }
  return spec;
}

}  // namespace primelab
