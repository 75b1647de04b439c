#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "primelab/metrics.hpp"
#include "primelab/prime_end.hpp"

using namespace primelab;

namespace {

// Component of {cells within r of p} containing the cell straight above p.
CellSet half_ball(const GridDomain& dom, Point p, double r) {
  CellSet ball;
  for (GridId id : dom.cells()) {
    if (distance(dom.center(id), p) <= r + 1e-12) ball.push_back(id);
  }
  const GridId above = at(dom, {p.x, p.y + dom.h()});
  for (auto& comp : split_components(dom, ball, Connectivity::four)) {
    if (std::binary_search(comp.begin(), comp.end(), above)) return comp;
  }
  return {};
}

std::map<GridId, int> nodes_per_anchor(const std::vector<BoundaryNode>& nodes) {
  std::map<GridId, int> count;
  for (const auto& n : nodes) ++count[n.anchor];
  return count;
}

}  // namespace

TEST_CASE("boundary nodes of the square: one resolved node per anchor") {
  const auto dom = generate(square_spec(1.0 / 8.0)).domain;
  const auto nodes = build_boundary_nodes(dom);
  CHECK(nodes.size() == 28);
  CHECK(boundary_anchors(dom).size() == 28);
  for (const auto& n : nodes) {
    CHECK(n.resolved);
    CHECK(n.approach_id == 0);
    CHECK(n.approach_cells.size() == 1);
  }
  CHECK(resolved_nodes(nodes).size() == nodes.size());
}

TEST_CASE("slit census: two nodes along the slit, one at the tip") {
  const double h = 1.0 / 32.0;
  const auto dom = generate(slit_spec(h)).domain;
  const auto nodes = build_boundary_nodes(dom);
  const auto count = nodes_per_anchor(nodes);
  const Point tip{0.5, 0.5};
  CHECK(count.at(at(dom, tip)) == 1);
  for (int i = 21; i < 32; ++i) {  // farther than 4h from the tip
    const GridId a = dom.id(Cell{i, 16});
    CHECK(count.at(a) == 2);
  }
  for (const auto& n : nodes) {
    if (n.anchor_point.y != 0.5 || n.anchor_point.x < 0.5 + 4.5 * h || n.anchor_point.x > 1.0 - h / 2) continue;
    const Point c = n.approach_centroid(dom);
    CHECK(std::abs(c.y - 0.5) == doctest::Approx(h));
    CHECK(n.resolved);
  }
}

TEST_CASE("chain validation") {
  const double h = 1.0 / 64.0;
  const auto dom = generate(slit_spec(h)).domain;
  const Point p{0.75, 0.5};
  const auto e8 = half_ball(dom, p, 8 * h);
  const auto e4 = half_ball(dom, p, 4 * h);
  const auto e1 = half_ball(dom, p, h);

  SUBCASE("identical consecutive levels fail (b)") {
    try {
      validate_chain(dom, {e8, e8});
      FAIL("expected ChainError");
    } catch (const ChainError& e) {
      CHECK(e.condition() == 'b');
      CHECK(e.level() == 2);
    }
  }
  SUBCASE("a level outside its predecessor fails (a)") {
    const auto other = half_ball(dom, {0.85, 0.5}, 4 * h);
    try {
      validate_chain(dom, {e8, other});
      FAIL("expected ChainError");
    } catch (const ChainError& e) {
      CHECK(e.condition() == 'a');
      CHECK(e.level() == 2);
    }
  }
  SUBCASE("nested half-balls above a slit point are accepted") {
    const auto chain = validate_chain(dom, {e8, e4, e1});
    REQUIRE(chain.impression.size() == 1);
    CHECK(chain.impression.front() == at(dom, p));
    for (double s : chain.separations) CHECK(s > 0.0);
    for (const auto& level : chain.levels) {
      for (GridId id : level) CHECK(dom.center(id).y > 0.5);
    }
  }
  SUBCASE("halved radii give an equivalent chain") {
    const auto a = validate_chain(dom, {e8, e4, e1});
    const auto b = validate_chain(dom, {half_ball(dom, p, 12 * h), e8, e1});
    CHECK(divides(a, b));
    CHECK(divides(b, a));
    CHECK(equivalent(a, b));
  }
}

TEST_CASE("node chains at different comb teeth are not equivalent") {
  const double h = 1.0 / 64.0;
  const auto dom = generate(comb_spec(h, 4)).domain;
  const auto nodes = build_boundary_nodes(dom);
  const BoundaryNode* first = nullptr;
  const BoundaryNode* second = nullptr;
  for (const auto& n : nodes) {
    if (!n.resolved || std::abs(n.anchor_point.y - 0.25) > 1e-12) continue;
    if (std::abs(n.anchor_point.x - 0.5) <= h && n.approach_centroid(dom).x > n.anchor_point.x && !first) first = &n;
    if (std::abs(n.anchor_point.x - 1.0 / 3.0) <= h && n.approach_centroid(dom).x > n.anchor_point.x && !second)
      second = &n;
  }
  REQUIRE(first);
  REQUIRE(second);
  const auto a = node_chain(dom, *first);
  const auto b = node_chain(dom, *second);
  CHECK_FALSE(divides(a, b));
  CHECK_FALSE(equivalent(a, b));
  CHECK(equivalent(a, a));
}

TEST_CASE("chains generated by curves") {
  SUBCASE("straight curve to an edge midpoint: singleton impression") {
    const auto dom = generate(square_spec(1.0 / 32.0)).domain;
    const auto chain = chain_of_curve(dom, {{0.5, 0.5}, {0.5, 0.25}, {0.5, 0.0}});
    REQUIRE(chain.impression.size() == 1);
    CHECK(chain.impression.front() == at(dom, {0.5, 0.0}));
    const auto end = make_end(dom, chain, build_boundary_nodes(dom));
    CHECK(end.singleton);
    CHECK(end.node.has_value());
  }
  SUBCASE("curve into the slit tip from above") {
    const auto dom = generate(slit_spec(1.0 / 32.0)).domain;
    const auto chain =
        chain_of_curve(dom, {{0.8, 0.9}, {0.3, 0.8}, {0.4, 0.65}, {0.5, 0.6}, {0.5, 0.55}, {0.5, 0.5}});
    REQUIRE(chain.impression.size() == 1);
    CHECK(chain.impression.front() == at(dom, {0.5, 0.5}));
    for (GridId id : chain.levels.back()) CHECK(dom.center(id).y > 0.5);
  }
  SUBCASE("curve running down the double comb's left wall: non-singleton impression") {
    const double h = 1.0 / 64.0;
    const auto dom = generate(double_comb_spec(h, 4)).domain;
    const auto chain = chain_of_curve(dom, {{h, 0.9}, {h, 0.1}, {0.0, 0.1}});
    CHECK(chain.impression.size() > 10);
    for (GridId a : chain.impression) CHECK(dom.cell(a).i == 0);
    CHECK_FALSE(make_end(dom, chain, build_boundary_nodes(dom)).singleton);
  }
  SUBCASE("curve ending inside the domain is rejected") {
    const auto dom = generate(square_spec(1.0 / 32.0)).domain;
    CHECK_THROWS_AS(chain_of_curve(dom, {{0.3, 0.3}, {0.6, 0.6}}), ChainError);
  }
}

TEST_CASE("pushforward and pullback") {
  const double h = 1.0 / 32.0;
  const auto dom = generate(slit_spec(h)).domain;
  const auto nodes = build_boundary_nodes(dom);

  SUBCASE("interior sets are fixed") {
    const CellSet e = make_cell_set({at(dom, {0.3, 0.3}), at(dom, {0.3, 0.3 + h})});
    const auto pe = pushforward(dom, nodes, e);
    CHECK(pe.cells == e);
    CHECK(pe.nodes.empty());
    CHECK(pullback(nodes, pe) == e);
  }
  SUBCASE("the closed slit picks up both node families") {
    CellSet slit;
    for (int i = 16; i < 32; ++i) slit.push_back(dom.id(Cell{i, 16}));
    const auto pe = pushforward(dom, nodes, slit);
    CHECK(pe.cells.empty());
    int above = 0;
    int below = 0;
    for (int k : pe.nodes) {
      (nodes[k].approach_centroid(dom).y > 0.5 ? above : below) += 1;
    }
    CHECK(above >= 11);
    CHECK(below >= 11);
  }
  SUBCASE("open ambient sets give nodes whose approach meets the set") {
    const GridId a = at(dom, {0.75, 0.5});
    CellSet e;
    for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
      if (distance(dom.center(id), dom.center(a)) < 3.0 * h) e.push_back(id);
    }
    const auto pe = pushforward(dom, nodes, e);
    CHECK(!pe.nodes.empty());
    for (int k : pe.nodes) CHECK(!set_intersection(nodes[k].approach_cells, pe.cells).empty());
  }
  SUBCASE("upper half plus upper slit nodes does not survive P(P^-1(F))") {
    PrimeEndSet f;
    for (GridId id : dom.cells()) {
      if (dom.center(id).y > 0.5) f.cells.push_back(id);
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& n = nodes[k];
      if (n.anchor_point.y == 0.5 && n.anchor_point.x >= 0.5 && n.resolved && n.approach_centroid(dom).y > 0.5) {
        f.nodes.push_back(static_cast<int>(k));
      }
    }
    const auto round_trip = pushforward(dom, nodes, pullback(nodes, f));
    CHECK(is_subset(f, round_trip));
    CHECK_FALSE(is_subset(round_trip, f));
    bool lower_slit_node = false;
    for (int k : round_trip.nodes) {
      lower_slit_node = lower_slit_node || (nodes[k].anchor_point.y == 0.5 && nodes[k].approach_centroid(dom).y < 0.5);
    }
    CHECK(lower_slit_node);
  }
}

TEST_CASE("node density along node chains") {
  const auto dom = generate(slit_spec(1.0 / 32.0)).domain;
  const auto nodes = build_boundary_nodes(dom);
  std::vector<Chain> chains;
  for (std::size_t k = 0; k < nodes.size(); k += 17) {
    if (nodes[k].resolved) chains.push_back(node_chain(dom, nodes[k]));
  }
  const auto report = density_diagnostic(dom, nodes, chains);
  CHECK(report.all_finite);
  REQUIRE(report.chains.size() == chains.size());
  for (const auto& levels : report.chains) {
    for (const auto& l : levels) CHECK(l.nodes_inside >= 1);
  }
}
