#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "primelab/sobolev_capacity.hpp"

using namespace primelab;

namespace {

CellSet disk(const GridDomain& dom, Point c, double r) {
  CellSet out;
  for (GridId id : dom.cells()) {
    if (distance(dom.center(id), c) <= r + 1e-12) out.push_back(id);
  }
  return out;
}

PrimeEndSet cells_only(CellSet c) { return {std::move(c), {}}; }

}  // namespace

TEST_CASE("energy of simple functions") {
  const auto dom = generate(square_spec(1.0 / 64.0)).domain;
  SUBCASE("constants") {
    const auto u = GridFunction::on_cells(dom, 0.7);
    const auto e = energy(dom, u, 3.0);
    CHECK(e.gradient_term == 0.0);
    CHECK(e.lp_term == doctest::Approx(std::pow(0.7, 3.0) * dom.measure()).epsilon(1e-12));
  }
  SUBCASE("u = x has gradient term close to the area") {
    auto u = GridFunction::on_cells(dom, 0.0);
    for (GridId id : dom.cells()) u.values[id] = dom.center(id).x;
    const auto e = energy(dom, u, 2.0);
    // Independent sum: (n-1) rows of (n-2) unit-slope horizontal edges, each h^2.
    const double n = 64.0;
    const double expected = (n - 1.0) * (n - 2.0) / (n * n);
    CHECK(e.gradient_term == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(e.gradient_term - 1.0) <= 0.05);
  }
  SUBCASE("homogeneity") {
    auto u = GridFunction::on_cells(dom, 0.0);
    for (GridId id : dom.cells()) u.values[id] = std::sin(3.0 * dom.center(id).x) * dom.center(id).y;
    auto v = u;
    for (GridId id : dom.cells()) v.values[id] *= 2.0;
    for (double p : {1.5, 2.0, 3.0}) {
      const auto a = energy(dom, u, p);
      const auto b = energy(dom, v, p);
      CHECK(b.lp_term == doctest::Approx(std::pow(2.0, p) * a.lp_term).epsilon(1e-12));
      CHECK(b.gradient_term == doctest::Approx(std::pow(2.0, p) * a.gradient_term).epsilon(1e-12));
      CHECK(b.norm_p == doctest::Approx(2.0 * a.norm_p).epsilon(1e-12));
    }
  }
  SUBCASE("foreign grid functions are rejected") {
    const auto other = generate(square_spec(1.0 / 32.0)).domain;
    CHECK_THROWS_AS(energy(dom, GridFunction::on_cells(other, 1.0), 2.0), DomainError);
  }
}

TEST_CASE("capacity conventions") {
  const auto dom = generate(square_spec(1.0 / 16.0)).domain;
  const auto nodes = build_boundary_nodes(dom);
  SUBCASE("empty target") {
    CapacityProblem prob;
    CHECK_THROWS_AS(capacity(dom, nodes, prob), std::invalid_argument);
    CHECK(prime_end_capacity(dom, nodes, {}, 2.0) == 0.0);
    CHECK(ambient_capacity(dom, {}, 2.0) == 0.0);
  }
  SUBCASE("target = all of the domain") {
    CapacityProblem prob;
    prob.target_points = dom.cells();
    const auto r = capacity(dom, nodes, prob);
    CHECK(r.value == doctest::Approx(dom.measure()).epsilon(1e-12));
    for (GridId id : dom.cells()) CHECK(r.minimizer.values[id] == 1.0);
  }
  SUBCASE("minimizer stays in [0, 1]") {
    CapacityProblem prob;
    prob.p = 3.0;
    prob.target_points = disk(dom, {0.5, 0.5}, 0.15);
    const auto r = capacity(dom, nodes, prob);
    for (GridId id : dom.cells()) {
      CHECK(r.minimizer.values[id] >= 0.0);
      CHECK(r.minimizer.values[id] <= 1.0);
    }
    const auto e = energy(dom, r.minimizer, 3.0, nodes);
    CHECK(r.value == doctest::Approx(e.lp_term + e.gradient_term).epsilon(1e-9));
  }
}

TEST_CASE("capacity axioms on a 33x33 fixture") {
  const auto dom = generate(square_spec(1.0 / 32.0)).domain;
  const auto nodes = build_boundary_nodes(dom);
  const double h = dom.h();
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    SUBCASE("nested balls") {
      const auto rep = capacity_axioms_check(
          dom, nodes, {cells_only(disk(dom, {0.5, 0.5}, 0.1)), cells_only(disk(dom, {0.5, 0.5}, 0.2))}, p);
      CHECK(rep.monotone);
      REQUIRE(rep.values.size() == 2);
      CHECK(rep.values[0] <= rep.values[1]);
      CHECK(rep.subadditive);
      CHECK(rep.measure_bound);
    }
    SUBCASE("two disjoint blobs: strictly subadditive") {
      const auto rep = capacity_axioms_check(
          dom, nodes, {cells_only(disk(dom, {0.3, 0.3}, 0.08)), cells_only(disk(dom, {0.7, 0.7}, 0.08))}, p);
      CHECK(rep.subadditive);
      CHECK(rep.subadditivity_slack > 1e-6);
    }
    SUBCASE("single cell has capacity at least h^2") {
      const auto c = prime_end_capacity(dom, nodes, cells_only({at(dom, {0.5, 0.5})}), p);
      CHECK(c >= h * h);
    }
  }
}

TEST_CASE("prime-end capacity against ambient capacity") {
  const auto dom = generate(square_spec(1.0 / 32.0)).domain;
  const auto nodes = build_boundary_nodes(dom);
  SUBCASE("interior blob") {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto cmp = compare_capacities(dom, nodes, disk(dom, {0.5, 0.5}, 0.12), p);
      CHECK(cmp.pushforward_holds);
      CHECK(cmp.pullback_holds);
      CHECK(cmp.prime_end_of_pushforward <= cmp.ambient_of_set + 1e-6);
    }
  }
  SUBCASE("corner sliver outside the closure of the cells") {
    const CellSet corners = make_cell_set({dom.id(Cell{0, 0}), dom.id(Cell{32, 0}), dom.id(Cell{0, 32})});
    const auto cmp = compare_capacities(dom, nodes, corners, 2.0);
    CHECK(cmp.pushed.empty());
    CHECK(cmp.prime_end_of_pushforward == 0.0);
    CHECK(cmp.ambient_of_set > 0.0);
    CHECK(cmp.pushforward_holds);
  }
  SUBCASE("boundary edge") {
    CellSet left;
    for (int j = 1; j < 32; ++j) left.push_back(dom.id(Cell{0, j}));
    const auto cmp = compare_capacities(dom, nodes, left, 2.0);
    CHECK(cmp.pushed.nodes.size() == 31);
    CHECK(cmp.pushforward_holds);
    CHECK(cmp.pullback_holds);
  }
}
