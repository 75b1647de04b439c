#pragma once

#include <stdexcept>
#include <string>

#include "primelab/domain.hpp"

namespace primelab {

/// Malformed configuration; `field` names the offending key (or is empty
/// for syntax errors, whose message carries the line and column).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses a domain spec from JSON, e.g.
///   {"kind": "comb", "h": 0.0078125, "teeth": 8, "connectivity": 4}
/// Unknown keys are rejected so that typos do not pass silently.
DomainSpec parse_domain_spec(const std::string& json_text);

/// Canonical JSON form of a spec (round-trips through parse_domain_spec).
std::string domain_spec_json(const DomainSpec& spec);

/// PBM-style text mask: "P1", optional "# key=value" comment lines, the
/// width and height, then rows from the top with 1 = inside.
std::string mask_pbm(const GridDomain& dom, const std::string& comments = {});

/// Custom spec whose rows come from a PBM mask.
DomainSpec spec_from_pbm(const std::string& text, double h);

}  // namespace primelab
