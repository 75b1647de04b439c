#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "primelab/experiment.hpp"
#include "primelab/grid_io.hpp"
#include "primelab/metrics.hpp"
#include "primelab/p_energy.hpp"
#include "primelab/prime_end.hpp"
#include "primelab/report.hpp"
#include "primelab/sobolev_capacity.hpp"
#include "primelab/solver.hpp"

namespace fs = std::filesystem;
using namespace primelab;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kSolver = 3, kTrend = 4 };

// Thrown for bad flag values; maps to the config exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Level { error, warn, info, debug };

struct Logger {
  Level level = Level::info;
  void operator()(Level at, const std::string& tag, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (at <= level) std::cerr << "[" << names[static_cast<int>(at)] << "] " << tag << ": " << msg << "\n";
  }
};

struct Global {
  std::string out = "primelab_out";
  std::uint64_t seed = 0;
  std::string log = "info";
  Logger logger;
  std::string invocation;  // subcommand and flags, minus --out and --log
};

struct DomainFlags {
  std::string spec_file;
  std::string kind = "square";
  double h = 1.0 / 32.0;
  int teeth = 4;
  int connectivity = 4;
};

// `capacity` uses --kind for the capacity kind, so the domain kind is also
// reachable as --domain.
void add_domain_flags(CLI::App* cmd, DomainFlags& d, bool kind_flag = true) {
  cmd->add_option("--spec", d.spec_file, "JSON domain spec file (overrides the flags below)");
  cmd->add_option(kind_flag ? "--kind,--domain" : "--domain", d.kind, "square, comb, double_comb, slit, annulus");
  cmd->add_option("--h", d.h, "grid spacing");
  cmd->add_option("--teeth", d.teeth, "comb tooth count");
  cmd->add_option("--connectivity", d.connectivity, "4 or 8");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

DomainSpec domain_spec(const DomainFlags& d) {
  if (!d.spec_file.empty()) return parse_domain_spec(read_file(d.spec_file));
  // Route the flags through the JSON parser so both paths validate alike.
  std::ostringstream j;
  j.precision(17);
  j << R"({"kind": ")" << d.kind << R"(", "h": )" << d.h << R"(, "connectivity": )" << d.connectivity;
  if (d.kind == "comb" || d.kind == "double_comb") j << R"(, "teeth": )" << d.teeth;
  j << "}";
  return parse_domain_spec(j.str());
}

Point parse_point(const std::string& text, const std::string& flag) {
  Point p;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> p.x >> comma >> p.y) || comma != ',' || !(in >> std::ws).eof()) {
    throw UsageError(flag + ": expected x,y but got '" + text + "'");
  }
  return p;
}

class Session {
 public:
  Session(const Global& g, std::string command) : g_(g), command_(std::move(command)) {
    fs::create_directories(g_.out);
  }

  ArtifactMeta meta(double h, double p, double tol, const DomainSpec* spec = nullptr) const {
    ArtifactMeta m;
    m.command = g_.invocation;
    m.h = h;
    m.p = p;
    m.tolerance = tol;
    m.seed = g_.seed;
    if (spec) m.domain = domain_spec_json(*spec);
    return m;
  }

  void write(const std::string& name, const std::string& content) const {
    const auto path = (fs::path(g_.out) / name).string();
    write_text_file(path, content);
    log(Level::info, "wrote " + path);
  }

  void log(Level at, const std::string& msg) const { g_.logger(at, command_, msg); }
  void log(Level at, const std::string& tag, const std::string& msg) const { g_.logger(at, command_ + "/" + tag, msg); }

 private:
  const Global& g_;
  std::string command_;
};

// ---- gen ----

int cmd_gen(const Global& g, const DomainFlags& d) {
  Session s(g, "gen");
  const DomainSpec spec = domain_spec(d);
  const GeneratedDomain gen = generate(spec);
  const ArtifactMeta m = s.meta(spec.h, 0.0, 0.0, &spec);
  s.write("domain.json", domain_spec_json(spec) + "\n");
  s.write("mask.pbm", mask_pbm(gen.domain, meta_lines(m)));
  s.write("clipping.json", clipping_json(gen, m));
  s.log(Level::info, std::to_string(gen.domain.cell_count()) + " cells, " + std::to_string(gen.clipped.size()) +
                         " features clipped");
  return kOk;
}

// ---- metric ----

struct MetricFlags {
  std::string from;
  std::string to;
  bool maz = false;
  double tol = 0.0;
};

int cmd_metric(const Global& g, const DomainFlags& d, const MetricFlags& f) {
  Session s(g, "metric");
  const DomainSpec spec = domain_spec(d);
  const GridDomain dom = generate(spec).domain;
  const GridId x = dom.nearest_cell(parse_point(f.from, "--from"));
  const double tol = f.tol > 0.0 ? f.tol : dom.h();
  if (f.to.empty()) {
    const auto field = inner_distance_field(dom, x);
    s.write("inner_distance.csv", distance_csv(dom, field, s.meta(spec.h, 0.0, 0.0, &spec)));
    return kOk;
  }
  const GridId y = dom.nearest_cell(parse_point(f.to, "--to"));
  const double inner = inner_distance(dom, x, y);
  MazBracket b{kInfinity, kInfinity, {}};
  if (f.maz) b = mazurkiewicz_distance(dom, x, y, tol);
  s.write("metric.json", bracket_json(dom, x, y, b, inner, s.meta(spec.h, 0.0, f.maz ? tol : 0.0, &spec)));
  s.log(Level::info, "inner " + std::to_string(inner) +
                         (f.maz ? ", maz [" + std::to_string(b.lo) + ", " + std::to_string(b.hi) + "]" : ""));
  return kOk;
}

// ---- boundary ----

struct BoundaryFlags {
  std::vector<std::string> curve;  // "x,y" per vertex
};

int cmd_boundary(const Global& g, const DomainFlags& d, const BoundaryFlags& f) {
  Session s(g, "boundary");
  const DomainSpec spec = domain_spec(d);
  const GridDomain dom = generate(spec).domain;
  const auto nodes = build_boundary_nodes(dom);
  const ArtifactMeta m = s.meta(spec.h, 0.0, 0.0, &spec);
  s.write("nodes.json", nodes_json(dom, nodes, m));
  int unresolved = 0;
  for (const auto& n : nodes) unresolved += n.resolved ? 0 : 1;
  s.log(Level::info, std::to_string(nodes.size()) + " nodes, " + std::to_string(unresolved) + " unresolved");
  if (!f.curve.empty()) {
    std::vector<Point> polyline;
    for (const auto& vertex : f.curve) polyline.push_back(parse_point(vertex, "--curve"));
    s.write("chain.json", chain_json(dom, chain_of_curve(dom, polyline), m));
  }
  return kOk;
}

// ---- solve ----

struct SolveFlags {
  double p = 2.0;
  std::string data = "x";
  std::string obstacle;
  double tol = 1e-10;
  int max_iterations = SolverOptions{}.max_iterations;
};

// Data rules: x, y, or a constant.
double data_value(const std::string& rule, Point a) {
  if (rule == "x") return a.x;
  if (rule == "y") return a.y;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(rule, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != rule.size()) throw UsageError("--data: expected x, y or a number but got '" + rule + "'");
  return v;
}

int cmd_solve(const Global& g, const DomainFlags& d, const SolveFlags& f) {
  Session s(g, "solve");
  const DomainSpec spec = domain_spec(d);
  const GridDomain dom = generate(spec).domain;
  DirichletProblem prob;
  prob.nodes = build_boundary_nodes(dom);
  prob.p = f.p;
  prob.options.step_tolerance = f.tol;
  prob.options.max_iterations = f.max_iterations;
  for (const auto& n : prob.nodes) prob.data.push_back(data_value(f.data, n.anchor_point));
  GridFunction u;
  if (f.obstacle.empty()) {
    u = solve_dirichlet(dom, prob);
  } else {
    ObstacleProblem ob{prob, GridFunction::on_grid(dom, std::numeric_limits<double>::quiet_NaN())};
    for (GridId id : dom.cells()) ob.psi.values[id] = data_value(f.obstacle, dom.center(id));
    u = solve_obstacle(dom, ob);
  }
  const ArtifactMeta m = s.meta(spec.h, f.p, f.tol, &spec);
  s.write("solution.csv", field_csv(dom, u, m));
  s.write("solution.svg", heatmap_svg(dom, u, "u", m));
  return kOk;
}

// ---- capacity ----

struct CapacityFlags {
  std::string kind = "prime_end";
  std::string target = "left_edge";
  double p = 2.0;
  double tol = 1e-10;
};

// Named target regions: the four edges (points within h/2 of the bounding
// box side) or disk:x,y,r.
RegionRule target_region(const std::string& name, const GridDomain& dom) {
  const double h = dom.h();
  const Point o = dom.origin();
  const double x1 = o.x + (dom.nx() - 1) * h;
  const double y1 = o.y + (dom.ny() - 1) * h;
  const double e = 0.5 * h;
  if (name == "left_edge") return [=](Point a) { return a.x < o.x + e; };
  if (name == "right_edge") return [=](Point a) { return a.x > x1 - e; };
  if (name == "bottom_edge") return [=](Point a) { return a.y < o.y + e; };
  if (name == "top_edge") return [=](Point a) { return a.y > y1 - e; };
  if (name.rfind("disk:", 0) == 0) {
    double cx = 0.0, cy = 0.0, r = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(name.substr(5));
    if ((in >> cx >> c1 >> cy >> c2 >> r) && c1 == ',' && c2 == ',' && r > 0.0) {
      return [=](Point a) { return distance(a, {cx, cy}) <= r + 1e-12; };
    }
  }
  throw UsageError("--target: expected left_edge, right_edge, bottom_edge, top_edge or disk:x,y,r but got '" +
                   name + "'");
}

int cmd_capacity(const Global& g, const DomainFlags& d, const CapacityFlags& f) {
  Session s(g, "capacity");
  const DomainSpec spec = domain_spec(d);
  const GridDomain dom = generate(spec).domain;
  const RegionRule in_target = target_region(f.target, dom);
  CellSet points;
  for (GridId id = 0; id < static_cast<GridId>(dom.point_count()); ++id) {
    if (in_target(dom.center(id))) points.push_back(id);
  }
  if (points.empty()) throw UsageError("--target: region '" + f.target + "' contains no grid points");

  CapacityProblem prob;
  prob.p = f.p;
  prob.options.step_tolerance = f.tol;
  std::vector<BoundaryNode> nodes;
  if (f.kind == "ambient") {
    prob.kind = CapacityKind::ambient_cp;
    prob.target_points = points;
  } else if (f.kind == "prime_end") {
    prob.kind = CapacityKind::prime_end_cp;
    nodes = build_boundary_nodes(dom);
    const PrimeEndSet set = pushforward(dom, nodes, points);
    if (set.empty()) throw UsageError("--target: region '" + f.target + "' meets no cell or boundary node");
    prob.target_points = set.cells;
    prob.target_nodes = set.nodes;
  } else {
    throw UsageError("--kind: expected ambient or prime_end but got '" + f.kind + "'");
  }
  const CapacityResult res = capacity(dom, nodes, prob);
  s.write("capacity.json", capacity_json(prob.kind, res, s.meta(spec.h, f.p, f.tol, &spec)));
  s.log(Level::info, to_string(prob.kind) + " = " + std::to_string(res.value));
  return kOk;
}

// ---- experiment ----

struct ExperimentFlags {
  std::string name;
  double p = 2.0;
  std::vector<int> teeth{4, 8, 16};
  double h = 0.0;  // 0 picks the experiment default
  bool jitter = false;
};

int cmd_experiment(const Global& g, const ExperimentFlags& f) {
  Session s(g, "experiment");
  if (f.name == "slit") {
    const double h = f.h > 0.0 ? f.h : 1.0 / 32.0;
    DomainSpec spec;
    spec.kind = DomainKind::slit;
    spec.h = h;
    const GridDomain dom = generate(spec).domain;
    const SlitReport rep = run_slit_experiment(h, f.p);
    const ArtifactMeta m = s.meta(h, f.p, SolverOptions{}.step_tolerance, &spec);
    s.write("slit.json", slit_json(dom, rep, m));
    s.write("slit_solution.svg", heatmap_svg(dom, rep.solution, "side data solve", m));
    if (!rep.census_ok) s.log(Level::error, "census: " + std::to_string(rep.interior_doubled) + "/" +
                                                std::to_string(rep.interior_anchors) + " interior anchors doubled, tip nodes " +
                                                std::to_string(rep.tip_nodes));
    if (!rep.sides_ok) s.log(Level::error, "sides: above " + std::to_string(rep.value_above) + ", below " +
                                               std::to_string(rep.value_below));
    return rep.census_ok && rep.sides_ok ? kOk : kTrend;
  }

  DomainKind kind;
  if (f.name == "comb") {
    kind = DomainKind::comb;
  } else if (f.name == "double_comb") {
    kind = DomainKind::double_comb;
  } else {
    throw UsageError("experiment: expected comb, double_comb or slit but got '" + f.name + "'");
  }
  CombSweepConfig cfg;
  cfg.kind = kind;
  cfg.p = f.p;
  cfg.teeth = f.teeth;
  if (f.h > 0.0) cfg.h = f.h;

  PerturbationSettings settings;
  settings.p = cfg.p;
  settings.options = cfg.options;
  settings.probes = kCombProbes;
  if (f.jitter) {
    // Robustness mode: move each probe by up to h/4 per axis.
    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> shift(-0.25 * cfg.h, 0.25 * cfg.h);
    for (auto& q : settings.probes) {
      q.x += shift(rng);
      q.y += shift(rng);
    }
  }
  const auto family = comb_family(kind, cfg.teeth, cfg.h);
  for (const auto& member : family) {
    s.log(Level::debug, member.label, std::to_string(member.domain.cell_count()) + " cells");
  }
  const PerronReport rep = perturbation_experiment(family, height_data(), comb_region(kind, cfg.h), settings);
  const ArtifactMeta m = s.meta(cfg.h, cfg.p, rep.tolerance);
  s.write(f.name + "_report.json", perron_json(rep, m));
  s.write(f.name + "_gaps.csv", sweep_csv(rep, m));
  for (std::size_t k = 0; k < family.size() && k < rep.perturbation_gaps.size(); ++k) {
    const auto& row = rep.perturbation_gaps[k];
    s.write(row.label + "_gap.svg", heatmap_svg(family[k].domain, row.difference, "|u_f - u_{f+chi_E}|", m));
    s.log(Level::info, row.label, "max gap " + std::to_string(row.max_gap));
  }
  for (const auto& failure : rep.failures) s.log(Level::error, "trend failure: " + failure);
  return rep.failures.empty() ? kOk : kTrend;
}

Level parse_level(const std::string& name) {
  if (name == "error") return Level::error;
  if (name == "warn") return Level::warn;
  if (name == "info") return Level::info;
  if (name == "debug") return Level::debug;
  throw UsageError("--log: expected error, warn, info or debug but got '" + name + "'");
}

std::string invocation(int argc, char** argv) {
  std::string out;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--out" || a == "--log") {
      ++k;
      continue;
    }
    if (a.rfind("--out=", 0) == 0 || a.rfind("--log=", 0) == 0) continue;
    out += (out.empty() ? "" : " ") + a;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primelab: prime-end potential theory on planar grid domains"};
  app.require_subcommand(1);
  // --h is the grid spacing, so help is --help only (subcommands inherit this).
  app.set_help_flag("--help", "print this help and exit");
  Global g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed, recorded in every artifact")->capture_default_str();
  app.add_option("--log", g.log, "error, warn, info or debug")->capture_default_str();

  DomainFlags dom;
  auto* gen = app.add_subcommand("gen", "generate a domain: mask, canonical spec, clipping report");
  add_domain_flags(gen, dom);

  MetricFlags mf;
  auto* metric = app.add_subcommand("metric", "inner distance and Mazurkiewicz bracket between two points");
  add_domain_flags(metric, dom);
  metric->add_option("--from", mf.from, "x,y")->required();
  metric->add_option("--to", mf.to, "x,y (omit for the inner distance field from --from)");
  metric->add_flag("--maz", mf.maz, "also bracket the Mazurkiewicz distance");
  metric->add_option("--tol", mf.tol, "bracket resolution (default h)");

  BoundaryFlags bf;
  auto* boundary = app.add_subcommand("boundary", "boundary nodes and, optionally, the chain of a curve");
  add_domain_flags(boundary, dom);
  boundary->add_option("--curve", bf.curve, "polyline vertices x,y ... ending on the boundary");

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "p-harmonic Dirichlet or obstacle solve");
  add_domain_flags(solve, dom);
  solve->add_option("--p", sf.p, "exponent")->capture_default_str();
  solve->add_option("--data", sf.data, "boundary data: x, y or a constant")->capture_default_str();
  solve->add_option("--obstacle", sf.obstacle, "obstacle psi: x, y or a constant");
  solve->add_option("--tol", sf.tol, "Newton step tolerance")->capture_default_str();
  solve->add_option("--max-iterations", sf.max_iterations, "Newton iteration budget")->capture_default_str();

  CapacityFlags cf;
  auto* cap = app.add_subcommand("capacity", "ambient or prime-end capacity of a target region");
  add_domain_flags(cap, dom, false);
  cap->add_option("--kind", cf.kind, "ambient or prime_end")->capture_default_str();
  cap->add_option("--target", cf.target, "left_edge, right_edge, bottom_edge, top_edge or disk:x,y,r")
      ->capture_default_str();
  cap->add_option("--p", cf.p, "exponent")->capture_default_str();
  cap->add_option("--tol", cf.tol, "Newton step tolerance")->capture_default_str();

  ExperimentFlags ef;
  auto* exp = app.add_subcommand("experiment", "canned sweeps: comb, double_comb, slit");
  exp->add_option("name", ef.name, "comb, double_comb or slit")->required();
  exp->add_option("--p", ef.p, "exponent")->capture_default_str();
  exp->add_option("--teeth", ef.teeth, "tooth counts of the sweep")->delimiter(',');
  exp->add_option("--h", ef.h, "grid spacing (default 1/256 for combs, 1/32 for the slit)");
  exp->add_flag("--jitter", ef.jitter, "jitter the probes by up to h/4 using --seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    g.logger.level = parse_level(g.log);
    g.invocation = invocation(argc, argv);
    if (*gen) return cmd_gen(g, dom);
    if (*metric) return cmd_metric(g, dom, mf);
    if (*boundary) return cmd_boundary(g, dom, bf);
    if (*solve) return cmd_solve(g, dom, sf);
    if (*cap) return cmd_capacity(g, dom, cf);
    if (*exp) return cmd_experiment(g, ef);
  } catch (const ConfigError& e) {
    std::cerr << "config error" << (e.field().empty() ? "" : " in field '" + e.field() + "'") << ": " << e.what()
              << "\n";
    return kConfig;
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kConfig;
  } catch (const ChainError& e) {
    std::cerr << "chain error: " << e.what() << "\n";
    return kConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver did not converge: " << e.what() << " (residual " << e.residual() << ")\n";
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
