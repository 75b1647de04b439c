// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-9 run twice
// into separate artifact directories; criterion 10 compares the two runs
// byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "primelab/experiment.hpp"
#include "primelab/grid_io.hpp"
#include "primelab/metrics.hpp"
#include "primelab/report.hpp"
#include "primelab/solver.hpp"

namespace fs = std::filesystem;
using namespace primelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path dir;
  std::uint64_t seed = 0;

  void write(const std::string& name, const std::string& content) const { write_text_file((dir / name).string(), content); }
  ArtifactMeta meta(const std::string& command, double h, double p, double tol, const DomainSpec* spec = nullptr) const {
    ArtifactMeta m;
    m.command = command;
    m.h = h;
    m.p = p;
    m.tolerance = tol;
    m.seed = seed;
    if (spec) m.domain = domain_spec_json(*spec);
    return m;
  }
};

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt(v, "%.17g"); }

std::string commented(const ArtifactMeta& meta) {
  std::string out;
  std::istringstream lines(meta_lines(meta));
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  return out;
}

// 1. Metric chain on random pairs.
Outcome metric_chain(const Context& ctx) {
  const double h = 1.0 / 64.0;
  std::mt19937_64 rng(ctx.seed);
  std::ostringstream table;
  table << "fixture,x_i,x_j,y_i,y_j,d,lo,hi,d_inn\n";
  int violations = 0;
  double worst = -kInfinity;
  for (const auto& [name, spec] : {std::pair{"square", square_spec(h)}, std::pair{"slit", slit_spec(h)},
                                   std::pair{"comb", comb_spec(h, 8)}}) {
    const auto dom = generate(spec).domain;
    std::uniform_int_distribution<std::size_t> pick(0, dom.cell_count() - 1);
    for (int k = 0; k < 100; ++k) {
      const GridId x = dom.cells()[pick(rng)];
      const GridId y = dom.cells()[pick(rng)];
      const double d = distance(dom.center(x), dom.center(y));
      const auto b = mazurkiewicz_distance(dom, x, y, h);
      const double dinn = inner_distance(dom, x, y);
      const double slack = std::min({b.lo - (d - 2 * h), b.hi - b.lo, dinn + 2 * h - b.hi, 2 * b.lo + 2 * h - b.hi});
      worst = std::max(worst, -slack);
      if (slack < 0.0) ++violations;
      const Cell cx = dom.cell(x);
      const Cell cy = dom.cell(y);
      table << name << "," << cx.i << "," << cx.j << "," << cy.i << "," << cy.j << "," << num(d) << "," << num(b.lo)
            << "," << num(b.hi) << "," << num(dinn) << "\n";
    }
  }
  ctx.write("c1_metric_chain.csv", commented(ctx.meta("acceptance metric_chain", h, 0.0, 2 * h)) + table.str());
  return {violations == 0, "300 pairs, " + std::to_string(violations) + " violations, worst slack " + fmt(-worst)};
}

// 2. Bracket against the exhaustive connected-subset minimum.
Outcome maz_oracle(const Context& ctx) {
  const auto spec = slit_spec(1.0 / 8.0);
  const auto dom = generate(spec).domain;
  const double h = dom.h();
  oracle::MazExhaustive exact(dom);
  std::ostringstream table;
  table << "x_i,x_j,y_i,y_j,exhaustive,lo,hi\n";
  double worst = 0.0;
  int pairs = 0;
  bool lo_ok = true;
  const auto& cells = dom.cells();
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const double m = exact(cells[a], cells[b]);
      const auto br = mazurkiewicz_distance(dom, cells[a], cells[b], h);
      worst = std::max(worst, std::abs(br.hi - m));
      lo_ok = lo_ok && br.lo <= m + 1e-12;
      ++pairs;
      const Cell ca = dom.cell(cells[a]);
      const Cell cb = dom.cell(cells[b]);
      table << ca.i << "," << ca.j << "," << cb.i << "," << cb.j << "," << num(m) << "," << num(br.lo) << ","
            << num(br.hi) << "\n";
    }
  }
  ctx.write("c2_maz_oracle.csv", commented(ctx.meta("acceptance maz_oracle", h, 0.0, std::sqrt(2.0) * h, &spec)) + table.str());
  const bool pass = worst <= std::sqrt(2.0) * h + 1e-12 && lo_ok;
  return {pass, std::to_string(pairs) + " pairs on " + std::to_string(cells.size()) + " cells, max |hi - exact| " +
                    fmt(worst) + " (limit " + fmt(std::sqrt(2.0) * h) + ")" + (lo_ok ? "" : ", lo above exact")};
}

// 3. Slit doubling.
Outcome slit_doubling(const Context& ctx) {
  const double h = 1.0 / 32.0;
  const auto rep = run_slit_experiment(h, 2.0);
  auto spec = slit_spec(h);
  const auto dom = generate(spec).domain;
  ctx.write("c3_slit.json", slit_json(dom, rep, ctx.meta("acceptance slit", h, 2.0, 0.0, &spec)));
  return {rep.census_ok && rep.sides_ok,
          std::to_string(rep.interior_doubled) + "/" + std::to_string(rep.interior_anchors) +
              " interior anchors doubled, tip nodes " + std::to_string(rep.tip_nodes) + ", above " +
              fmt(rep.value_above) + ", below " + fmt(rep.value_below)};
}

// 4. Exact discrete solutions.
Outcome dirichlet_exactness(const Context& ctx) {
  const double h = 1.0 / 32.0;
  const auto spec = square_spec(h);
  const auto sq = generate(spec).domain;
  DirichletProblem prob;
  prob.nodes = build_boundary_nodes(sq);
  prob.p = 2.0;
  prob.data = node_data(prob.nodes, [](const BoundaryNode& n) { return n.anchor_point.x; });
  const auto u = solve_dirichlet(sq, prob);
  double err_square = 0.0;
  for (GridId id : sq.cells()) err_square = std::max(err_square, std::abs(u.values[id] - sq.center(id).x));
  ctx.write("c4_square_p2.csv", field_csv(sq, u, ctx.meta("acceptance dirichlet square", h, 2.0, 1e-9, &spec)));

  const int n = 32;
  const auto st = strip(n);
  double err_strip = 0.0;
  for (double p : {1.5, 3.0}) {
    DirichletProblem sp;
    sp.nodes = build_boundary_nodes(st);
    sp.p = p;
    sp.data = node_data(sp.nodes, [&](const BoundaryNode& node) {
      if (node.anchor_point.x == 0.0) return 0.0;
      if (node.anchor_point.x == n + 1.0) return 1.0;
      return std::numeric_limits<double>::quiet_NaN();
    });
    const auto v = solve_dirichlet(st, sp);
    for (int i = 1; i <= n; ++i) {
      err_strip = std::max(err_strip, std::abs(v.values[st.id(Cell{i, 1})] - i / (n + 1.0)));
    }
    ctx.write("c4_strip_p" + fmt(p, "%g") + ".csv", field_csv(st, v, ctx.meta("acceptance dirichlet strip", 1.0, p, 1e-7)));
  }
  return {err_square <= 1e-9 && err_strip <= 1e-7,
          "square p=2 max error " + fmt(err_square) + ", strip p in {1.5, 3} max error " + fmt(err_strip)};
}

// 5. Obstacle problem against active-set enumeration.
Outcome obstacle_oracle(const Context& ctx) {
  const int n = 9;
  const auto st = strip(n);
  double worst = 0.0;
  int k = 0;
  for (const auto& psi : {std::vector<double>(n, 0.75),
                          std::vector<double>{0.1, 0.5, 0.9, 0.6, 0.2, 0.4, 0.85, 0.3, 0.95}}) {
    ObstacleProblem ob;
    ob.base.nodes = build_boundary_nodes(st);
    ob.base.p = 2.0;
    ob.base.data = node_data(ob.base.nodes, [&](const BoundaryNode& node) {
      if (node.anchor_point.x == 0.0) return 0.0;
      if (node.anchor_point.x == n + 1.0) return 1.0;
      return std::numeric_limits<double>::quiet_NaN();
    });
    ob.psi = GridFunction::on_grid(st, std::numeric_limits<double>::quiet_NaN());
    for (int i = 1; i <= n; ++i) ob.psi.values[st.id(Cell{i, 1})] = psi[i - 1];
    const auto u = solve_obstacle(st, ob);
    const auto expected = oracle::obstacle_1d(psi, 0.0, 1.0);
    for (int i = 1; i <= n; ++i) worst = std::max(worst, std::abs(u.values[st.id(Cell{i, 1})] - expected[i - 1]));
    ctx.write("c5_obstacle_" + std::to_string(k++) + ".csv", field_csv(st, u, ctx.meta("acceptance obstacle", 1.0, 2.0, 1e-8)));
  }
  return {worst <= 1e-8, "N=9, 2 obstacles, 512 active sets each, max deviation " + fmt(worst)};
}

// 6. Capacity axioms and inequalities.
Outcome capacity_axioms(const Context& ctx) {
  const double h = 1.0 / 32.0;
  const double tol = 1e-6;
  std::ostringstream table;
  table << "fixture,p,check,slack,holds\n";
  int checks = 0;
  int failed = 0;
  double min_slack = kInfinity;
  auto record = [&](const std::string& fixture, double p, const std::string& what, double slack, bool holds) {
    ++checks;
    if (!holds) ++failed;
    min_slack = std::min(min_slack, slack);
    table << fixture << "," << fmt(p, "%g") << "," << what << "," << num(slack) << "," << (holds ? 1 : 0) << "\n";
  };
  for (const auto& [name, spec] : {std::pair{"square", square_spec(h)}, std::pair{"slit", slit_spec(h)},
                                   std::pair{"comb", comb_spec(h, 4)}}) {
    const auto dom = generate(spec).domain;
    const auto nodes = build_boundary_nodes(dom);
    auto disk = [&](Point c, double r) {
      CellSet out;
      for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
        if (distance(dom.center(id), c) <= r + 1e-12) out.push_back(id);
      }
      return out;
    };
    const Point c1{0.3, 0.75};
    const Point c2{0.75, 0.75};
    const std::vector<PrimeEndSet> sets{pushforward(dom, nodes, disk(c1, 0.08)),
                                        pushforward(dom, nodes, disk(c1, 0.16)),
                                        pushforward(dom, nodes, disk(c2, 0.1)),
                                        pushforward(dom, nodes, disk({1.0, 0.5}, 0.2))};
    for (double p : {1.5, 2.0, 3.0}) {
      const auto ax = capacity_axioms_check(dom, nodes, sets, p, tol);
      record(name, p, "subadditivity", ax.subadditivity_slack, ax.subadditive);
      for (const auto& m : ax.monotone_pairs) {
        record(name, p, "monotone_" + std::to_string(m.smaller) + "_" + std::to_string(m.larger), m.slack,
               m.slack >= -tol);
      }
      for (std::size_t k = 0; k < ax.measure_slack.size(); ++k) {
        record(name, p, "measure_" + std::to_string(k), ax.measure_slack[k], ax.measure_slack[k] >= -tol);
      }
      for (const auto& e : {disk({0.3, 0.3}, 0.1), disk({0.0, 0.5}, 0.15), disk({0.75, 0.5}, 0.1)}) {
        const auto cmp = compare_capacities(dom, nodes, e, p, tol);
        record(name, p, "pushforward", cmp.pushforward_slack, cmp.pushforward_holds);
        record(name, p, "pullback", cmp.pullback_slack, cmp.pullback_holds);
      }
    }
  }
  ctx.write("c6_capacity_axioms.csv", commented(ctx.meta("acceptance capacity_axioms", h, 0.0, tol)) + table.str());
  return {failed == 0, std::to_string(checks) + " checks on square, slit, comb, p in {1.5, 2, 3}; " +
                           std::to_string(failed) + " failed, least slack " + fmt(min_slack)};
}

// 7. Annulus capacity against the radial oracle.
Outcome annulus_capacity(const Context& ctx) {
  const double h = 1.0 / 128.0;
  DomainSpec spec;
  spec.kind = DomainKind::annulus;
  spec.h = h;
  spec.r_inner = 0.25;
  spec.r_outer = 0.5;
  const auto dom = generate(spec).domain;
  CapacityProblem prob;
  prob.kind = CapacityKind::ambient_cp;
  prob.p = 2.0;
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    const double r = distance(dom.center(id), spec.center);
    if (r <= spec.r_inner) prob.target_points.push_back(id);
    if (r >= spec.r_outer) prob.zero_points.push_back(id);
  }
  const auto res = capacity(dom, {}, prob);
  const double reference = oracle::radial_capacity_with_l2(0.25, 0.5, 200000);
  const double rel = std::abs(res.value - reference) / reference;
  ctx.write("c7_annulus.json", capacity_json(prob.kind, res, ctx.meta("acceptance annulus", h, 2.0, 0.1, &spec)));
  return {rel <= 0.1, "C_2 = " + fmt(res.value, "%.5f") + ", radial oracle " + fmt(reference, "%.5f") +
                          " (2pi/ln 2 = " + fmt(2.0 * std::acos(-1.0) / std::log(2.0), "%.5f") + "), relative error " +
                          fmt(rel)};
}

Outcome sweep(const Context& ctx, DomainKind kind, double p, const std::string& tag) {
  CombSweepConfig cfg;
  cfg.kind = kind;
  cfg.p = p;
  const auto rep = run_comb_sweep(cfg);
  const auto meta = ctx.meta("acceptance " + tag, cfg.h, p, rep.tolerance);
  ctx.write(tag + ".json", perron_json(rep, meta));
  ctx.write(tag + ".csv", sweep_csv(rep, meta));
  std::string detail = "log10 gaps";
  for (std::size_t q = 0; q < kCombProbes.size(); ++q) {
    detail += q == 0 ? " [" : "; [";
    for (std::size_t r = 0; r < rep.perturbation_gaps.size(); ++r) {
      detail += (r ? ", " : "") + fmt(rep.perturbation_gaps[r].probe_log10_gaps[q], "%.2f");
    }
    detail += "]";
  }
  detail += ", cap(P(E))";
  for (const auto& r : rep.perturbation_gaps) detail += " " + fmt(r.prime_end_capacity, "%.4f");
  detail += ", C_p(E) spread " + fmt(rep.ambient_spread);
  for (const auto& f : rep.failures) detail += "; " + f;
  const bool pass = rep.gaps_decreasing && rep.capacity_nonincreasing && rep.ambient_spread < 0.1 && rep.failures.empty();
  return {pass, detail};
}

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome(const Context&)> run;
};

std::vector<Criterion> criteria() {
  return {
      {1, "metric chain", 30, metric_chain},
      {2, "Mazurkiewicz oracle", 120, maz_oracle},
      {3, "slit doubling", 10, slit_doubling},
      {4, "Dirichlet exactness", 5, dirichlet_exactness},
      {5, "obstacle oracle", 1, obstacle_oracle},
      {6, "capacity axioms", 120, capacity_axioms},
      {7, "annulus capacity", 60, annulus_capacity},
      {8, "comb sweep p=2", 300, [](const Context& c) { return sweep(c, DomainKind::comb, 2.0, "c8_comb_p2"); }},
      {9, "double comb sweep p=2,3", 300,
       [](const Context& c) {
         const auto a = sweep(c, DomainKind::double_comb, 2.0, "c9_double_comb_p2");
         const auto b = sweep(c, DomainKind::double_comb, 3.0, "c9_double_comb_p3");
         return Outcome{a.pass && b.pass, "p=2: " + a.detail + " | p=3: " + b.detail};
       }},
  };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primelab acceptance criteria"};
  std::string out = "acceptance_artifacts";
  std::uint64_t seed = 20240601;
  std::vector<int> only;
  app.add_option("--out", out, "artifact directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--only", only, "run only these criteria (determinism is checked on them)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  auto list = criteria();
  if (!only.empty()) {
    std::erase_if(list, [&](const Criterion& c) { return std::find(only.begin(), only.end(), c.id) == only.end(); });
  }
  const fs::path root(out);
  fs::remove_all(root);
  bool all = true;
  for (int run = 1; run <= 2; ++run) {
    const Context ctx{root / ("run" + std::to_string(run)), seed};
    fs::create_directories(ctx.dir);
    for (const auto& c : list) {
      const auto t0 = std::chrono::steady_clock::now();
      Outcome o;
      try {
        o = c.run(ctx);
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (run == 2) continue;
      const bool in_time = secs <= c.time_limit;
      const bool pass = o.pass && in_time;
      all = all && pass;
      std::printf("[%s] %2d %-24s %s [%.1f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                  secs, c.time_limit);
      std::fflush(stdout);
    }
  }

  int files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::recursive_directory_iterator(root / "run1")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(entry.path(), root / "run1");
    const auto twin = root / "run2" / rel;
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) differing.push_back(rel.string());
  }
  const bool same = differing.empty() && files > 0;
  all = all && same;
  std::string detail = std::to_string(files) + " artifact files compared";
  for (const auto& d : differing) detail += ", differs: " + d;
  std::printf("[%s] 10 %-24s %s\n", same ? "PASS" : "FAIL", "determinism", detail.c_str());
  return all ? 0 : 1;
}
