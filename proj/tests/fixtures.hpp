#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "primelab/domain.hpp"
#include "primelab/prime_end.hpp"

inline primelab::DomainSpec square_spec(double h) {
  primelab::DomainSpec spec;
  spec.kind = primelab::DomainKind::square;
  spec.h = h;
  return spec;
}

inline primelab::DomainSpec comb_spec(double h, int teeth) {
  auto spec = square_spec(h);
  spec.kind = primelab::DomainKind::comb;
  spec.teeth = teeth;
  return spec;
}

inline primelab::DomainSpec double_comb_spec(double h, int teeth) {
  auto spec = comb_spec(h, teeth);
  spec.kind = primelab::DomainKind::double_comb;
  return spec;
}

// Unit square minus [1/2, 1] x {1/2}.
inline primelab::DomainSpec slit_spec(double h) {
  auto spec = square_spec(h);
  spec.kind = primelab::DomainKind::slit;
  return spec;
}

// 1 x n strip of cells at h = 1, framed by complement points.
inline primelab::GridDomain strip(int n) {
  primelab::DomainSpec spec;
  spec.kind = primelab::DomainKind::custom;
  spec.h = 1.0;
  const std::string frame(n + 2, '0');
  spec.rows = {frame, "0" + std::string(n, '1') + "0", frame};
  return primelab::generate(spec).domain;
}

inline primelab::GridId at(const primelab::GridDomain& dom, primelab::Point p) {
  return dom.id(dom.nearest_point(p));
}

// Node data from a rule on the anchor point; NaN leaves the node free.
template <class F>
std::vector<double> node_data(const std::vector<primelab::BoundaryNode>& nodes, F f) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(f(n));
  return out;
}
