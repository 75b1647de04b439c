#include <cmath>
#include <cstdint>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "primelab/metrics.hpp"

using namespace primelab;

TEST_CASE("inner distance") {
  const double h = 1.0 / 64.0;
  const auto sq = generate(square_spec(h)).domain;
  SUBCASE("x = y") {
    const GridId x = at(sq, {0.3, 0.3});
    CHECK(inner_distance(sq, x, x) == 0.0);
  }
  SUBCASE("axis-aligned path on the square") {
    CHECK(inner_distance(sq, at(sq, {0.25, 0.5}), at(sq, {0.75, 0.5})) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("around the slit tip") {
    for (double hh : {1.0 / 32.0, 1.0 / 64.0}) {
      const auto sl = generate(slit_spec(hh)).domain;
      const GridId x = at(sl, {0.75, 0.5 + 2 * hh});
      const GridId y = at(sl, {0.75, 0.5 - 2 * hh});
      const double d = inner_distance(sl, x, y);
      CHECK(d == doctest::Approx(oracle::octile_dijkstra(sl, x, y)).epsilon(1e-12));
      // Between the continuum geodesic through the tip and the geodesic
      // around the removed tip cell, inflated by the octile factor and a
      // corner detour.
      const double through_tip = 2.0 * distance(sl.center(x), {0.5, 0.5});
      const double around_cell = 2.0 * distance(sl.center(x), {0.5 - hh, 0.5});
      CHECK(d >= through_tip);
      CHECK(d <= 1.0824 * around_cell + 2 * hh);
    }
  }
  SUBCASE("diagonal-only contact is not a path") {
    DomainSpec spec;
    spec.kind = DomainKind::custom;
    spec.h = 1.0;
    spec.connectivity = Connectivity::eight;
    spec.rows = {"0000", "0100", "0010", "0000"};
    const auto d = generate(spec).domain;
    const GridId a = d.id(Cell{1, 2});
    const GridId b = d.id(Cell{2, 1});
    CHECK(std::isinf(inner_distance(d, a, b)));
    const auto br = mazurkiewicz_distance(d, a, b, 0.1);
    CHECK(std::isinf(br.lo));
    CHECK(std::isinf(br.hi));
  }
}

TEST_CASE("Mazurkiewicz bracket") {
  const double h = 1.0 / 64.0;
  SUBCASE("x = y") {
    const auto sq = generate(square_spec(h)).domain;
    const GridId x = at(sq, {0.5, 0.5});
    const auto b = mazurkiewicz_distance(sq, x, x, h);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == 0.0);
  }
  SUBCASE("convex domain: lo = hi = |x - y| up to a cell diagonal") {
    const auto sq = generate(square_spec(h)).domain;
    const GridId x = at(sq, {0.2, 0.3});
    const GridId y = at(sq, {0.7, 0.6});
    const double d = distance(sq.center(x), sq.center(y));
    const auto b = mazurkiewicz_distance(sq, x, y, h);
    CHECK(b.lo <= d + 1e-12);
    CHECK(b.lo >= d - std::sqrt(2.0) * h);
    CHECK(b.hi <= d + std::sqrt(2.0) * h);
    CHECK(set_diameter(sq, b.witness) == doctest::Approx(b.hi));
    CHECK(is_connected(sq, b.witness, Connectivity::four));
  }
  SUBCASE("slit: opposite sides are 0.25 apart through the tip") {
    const auto sl = generate(slit_spec(h)).domain;
    const auto b = mazurkiewicz_distance(sl, at(sl, {0.75, 0.5 + 2 * h}), at(sl, {0.75, 0.5 - 2 * h}), h);
    MESSAGE("slit bracket [" << b.lo << ", " << b.hi << "]");
    // The tip point is removed, so the discrete minimum wraps one cell past it.
    CHECK(std::abs(b.lo - 0.25) <= 2 * h);
    CHECK(b.hi >= 0.25);
    CHECK(b.hi - b.lo <= 0.1);
  }
  SUBCASE("agrees with the exhaustive minimum on a 7x7 slit") {
    const auto sl = generate(slit_spec(1.0 / 8.0)).domain;
    oracle::MazExhaustive exact(sl);
    const GridId x = sl.id(Cell{6, 5});
    const GridId y = sl.id(Cell{6, 3});
    const double m = exact(x, y);
    const auto b = mazurkiewicz_distance(sl, x, y, sl.h());
    CHECK(b.lo <= m + 1e-12);
    CHECK(std::abs(b.hi - m) <= std::sqrt(2.0) * sl.h() + 1e-12);
  }
  SUBCASE("the pruned oracle matches plain subset enumeration") {
    DomainSpec spec;
    spec.kind = DomainKind::custom;
    spec.h = 1.0;
    spec.rows = {"000000", "011110", "010010", "011010", "000110", "000000"};
    const auto d = generate(spec).domain;
    const auto& cells = d.cells();
    const int n = static_cast<int>(cells.size());
    oracle::MazExhaustive exact(d);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
          if (!(mask >> a & 1u) || !(mask >> b & 1u)) continue;
          CellSet set;
          for (int k = 0; k < n; ++k)
            if (mask >> k & 1u) set.push_back(cells[k]);
          if (is_connected(d, set, Connectivity::four)) best = std::min(best, set_diameter(d, set));
        }
        CHECK(exact(cells[a], cells[b]) == doctest::Approx(best));
      }
    }
  }
  SUBCASE("nonpositive tolerance") {
    const auto sq = generate(square_spec(1.0 / 8.0)).domain;
    CHECK_THROWS_AS(mazurkiewicz_distance(sq, sq.cells()[0], sq.cells()[1], 0.0), std::invalid_argument);
  }
}

TEST_CASE("Mazurkiewicz separation of sets") {
  const double h = 1.0 / 32.0;
  SUBCASE("A = B") {
    const auto sq = generate(square_spec(h)).domain;
    const CellSet a{at(sq, {0.5, 0.5})};
    CHECK(maz_separation(sq, a, a) == 0.0);
  }
  SUBCASE("opposite sides of the slit at depth 0.25") {
    const auto sl = generate(slit_spec(h)).domain;
    const CellSet a{at(sl, {0.75, 0.5 + h})};
    const CellSet b{at(sl, {0.75, 0.5 - h})};
    CHECK(maz_separation(sl, a, b) >= 0.2);
  }
  SUBCASE("annulus rings") {
    DomainSpec spec;
    spec.kind = DomainKind::annulus;
    spec.h = h;
    const auto an = generate(spec).domain;
    CellSet inner, outer;
    for (GridId id : an.cells()) {
      const double r = distance(an.center(id), {0.5, 0.5});
      if (r < 0.25 + 1.5 * h) inner.push_back(id);
      if (r > 0.5 - 1.5 * h) outer.push_back(id);
    }
    double r1 = 0.0;
    double r2 = 1.0;
    for (GridId id : inner) r1 = std::max(r1, distance(an.center(id), {0.5, 0.5}));
    for (GridId id : outer) r2 = std::min(r2, distance(an.center(id), {0.5, 0.5}));
    CHECK(maz_separation(an, inner, outer) >= r2 - r1 - 2 * h);
  }
}

TEST_CASE("Mazurkiewicz neighborhoods") {
  const double h = 1.0 / 32.0;
  SUBCASE("r < h/2 is the seed set") {
    const auto sq = generate(square_spec(h)).domain;
    const CellSet a{at(sq, {0.5, 0.5})};
    CHECK(maz_neighborhood(sq, a, 0.4 * h) == a);
  }
  SUBCASE("stays above the slit") {
    const auto sl = generate(slit_spec(h)).domain;
    const GridId a = at(sl, {0.75, 0.5 + 2 * h});
    const auto nb = maz_neighborhood(sl, {a}, 0.2);
    CHECK(!nb.empty());
    for (GridId id : nb) {
      const auto c = sl.center(id);
      CHECK_FALSE((c.x > 0.5 && c.y < 0.5));
    }
  }
  SUBCASE("convex domain matches the Euclidean neighborhood up to a cell") {
    const auto sq = generate(square_spec(h)).domain;
    const GridId a = at(sq, {0.5, 0.5});
    const double r = 5.5 * h;
    const auto nb = maz_neighborhood(sq, {a}, r);
    const auto eu = neighborhood(sq, {a}, r);
    CHECK(is_subset(nb, eu));
    CHECK(is_subset(neighborhood(sq, {a}, r - std::sqrt(2.0) * h), nb));
  }
}

TEST_CASE("distance fields") {
  const auto sq = generate(square_spec(1.0 / 16.0)).domain;
  const GridId s = at(sq, {0.5, 0.5});
  const auto inner = inner_distance_field(sq, s);
  const auto amb = ambient_distance_field(sq, s);
  CHECK(inner.kind == MetricKind::inner);
  CHECK(amb.kind == MetricKind::ambient);
  for (GridId id : sq.cells()) {
    CHECK(amb.values[id] <= inner.values[id] + 1e-12);
    CHECK(inner.values[id] <= amb.values[id] * 1.0824 + 1e-12);  // octile vs Euclidean
  }
}
