#include "primelab/p_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace primelab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// phi(t) = (t^2 + eps^2)^(p/2) - eps^p and its first two derivatives. With
// eps = 0 and p = 2 this is exactly t^2.
struct Penalty {
  double p;
  double eps;

  double value(double t) const {
    if (p == 2.0) return t * t;
    return std::pow(t * t + eps * eps, 0.5 * p) - std::pow(eps, p);
  }
  double first(double t) const {
    if (p == 2.0) return 2.0 * t;
    return p * t * std::pow(t * t + eps * eps, 0.5 * p - 1.0);
  }
  double second(double t) const {
    if (p == 2.0) return 2.0;
    const double s = t * t + eps * eps;
    return p * std::pow(s, 0.5 * p - 2.0) * ((p - 1.0) * t * t + eps * eps);
  }
};

double edge_coefficient(const EnergyGraph& g, const EnergyGraph::Edge& e, double p) {
  return std::pow(e.length, 1.0 - p) * g.h;
}

double regularized_energy(const EnergyGraph& g, const Penalty& phi, const std::vector<double>& coef,
                          const std::vector<double>& u, bool include_lp) {
  double total = 0.0;
  if (include_lp) {
    for (std::size_t v = 0; v < g.vertex_count; ++v) {
      if (g.measure[v] != 0.0) total += g.measure[v] * phi.value(u[v]);
    }
  }
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    total += coef[k] * phi.value(u[e.a] - u[e.b]);
  }
  return total;
}

struct FreeIndex {
  std::vector<int> of_vertex;
  std::vector<int> vertices;
};

FreeIndex index_free(const EnergyGraph& g, const std::vector<double>& fixed) {
  FreeIndex idx;
  idx.of_vertex.assign(g.vertex_count, -1);
  for (std::size_t v = 0; v < g.vertex_count; ++v) {
    if (!std::isfinite(fixed[v])) {
      idx.of_vertex[v] = static_cast<int>(idx.vertices.size());
      idx.vertices.push_back(static_cast<int>(v));
    }
  }
  return idx;
}

class NewtonSystem {
 public:
  NewtonSystem(const EnergyGraph& g, const FreeIndex& idx, const std::vector<double>& coef, bool include_lp)
      : g_(g), idx_(idx), coef_(coef), include_lp_(include_lp), n_(static_cast<int>(idx.vertices.size())) {}

  // Assembles gradient and Hessian at u for the free vertices.
  void assemble(const Penalty& phi, const std::vector<double>& u, Vec& grad, SpMat& hess) const {
    grad.setZero(n_);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_) + 4 * g_.edges.size());
    std::vector<double> diag(static_cast<std::size_t>(n_), 0.0);
    if (include_lp_) {
      for (int f = 0; f < n_; ++f) {
        const int v = idx_.vertices[f];
        if (g_.measure[v] == 0.0) continue;
        grad[f] += g_.measure[v] * phi.first(u[v]);
        diag[f] += g_.measure[v] * phi.second(u[v]);
      }
    }
    for (std::size_t k = 0; k < g_.edges.size(); ++k) {
      const auto& e = g_.edges[k];
      const int fa = idx_.of_vertex[e.a];
      const int fb = idx_.of_vertex[e.b];
      if (fa < 0 && fb < 0) continue;
      const double t = u[e.a] - u[e.b];
      const double d1 = coef_[k] * phi.first(t);
      const double d2 = coef_[k] * phi.second(t);
      if (fa >= 0) {
        grad[fa] += d1;
        diag[fa] += d2;
      }
      if (fb >= 0) {
        grad[fb] -= d1;
        diag[fb] += d2;
      }
      if (fa >= 0 && fb >= 0) {
        trip.emplace_back(fa, fb, -d2);
        trip.emplace_back(fb, fa, -d2);
      }
    }
    for (int f = 0; f < n_; ++f) trip.emplace_back(f, f, diag[f]);
    hess.resize(n_, n_);
    hess.setFromTriplets(trip.begin(), trip.end());
  }

  int size() const { return n_; }

 private:
  const EnergyGraph& g_;
  const FreeIndex& idx_;
  const std::vector<double>& coef_;
  bool include_lp_;
  int n_;
};

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

EnergyTerms evaluate_energy(const EnergyGraph& graph, double p, const std::vector<double>& u, bool include_lp) {
  EnergyTerms out;
  if (include_lp) {
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (graph.measure[v] != 0.0) out.lp += graph.measure[v] * std::pow(std::abs(u[v]), p);
    }
  }
  for (const auto& e : graph.edges) {
    out.gradient += edge_coefficient(graph, e, p) * std::pow(std::abs(u[e.a] - u[e.b]), p);
  }
  return out;
}

std::vector<double> energy_gradient(const EnergyGraph& graph, double p, const std::vector<double>& u,
                                    bool include_lp, double epsilon) {
  const Penalty phi{p, epsilon};
  std::vector<double> grad(graph.vertex_count, 0.0);
  if (include_lp) {
    for (std::size_t v = 0; v < graph.vertex_count; ++v) grad[v] += graph.measure[v] * phi.first(u[v]);
  }
  for (const auto& e : graph.edges) {
    const double d1 = edge_coefficient(graph, e, p) * phi.first(u[e.a] - u[e.b]);
    grad[e.a] += d1;
    grad[e.b] -= d1;
  }
  return grad;
}

MinimizeResult minimize_p_energy(const EnergyGraph& graph, double p, const std::vector<double>& fixed,
                                 const std::vector<double>& initial, bool include_lp, const SolverOptions& options) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (fixed.size() != graph.vertex_count) throw std::invalid_argument("fixed vector has the wrong size");

  const FreeIndex idx = index_free(graph, fixed);
  std::vector<double> coef(graph.edges.size());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) coef[k] = edge_coefficient(graph, graph.edges[k], p);

  MinimizeResult result;
  result.u.assign(graph.vertex_count, 0.0);
  if (initial.size() == graph.vertex_count) {
    for (std::size_t v = 0; v < graph.vertex_count; ++v) result.u[v] = std::isfinite(initial[v]) ? initial[v] : 0.0;
  } else if (p != 2.0 && !idx.vertices.empty()) {
    result.u = minimize_p_energy(graph, 2.0, fixed, {}, include_lp, options).u;
  }
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (std::isfinite(fixed[v])) result.u[v] = fixed[v];
  }

  const Penalty phi{p, p == 2.0 ? 0.0 : options.epsilon_scale * graph.h};
  NewtonSystem system(graph, idx, coef, include_lp);
  auto finish = [&](int iterations) {
    result.iterations = iterations;
    const auto terms = evaluate_energy(graph, p, result.u, include_lp);
    result.energy = terms.lp + terms.gradient;
    const auto grad = energy_gradient(graph, p, result.u, include_lp, phi.eps);
    result.residual = 0.0;
    for (int v : idx.vertices) result.residual = std::max(result.residual, std::abs(grad[v]));
    return result;
  };
  if (idx.vertices.empty()) return finish(0);

  Vec grad;
  SpMat hess;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;

  auto factor_and_solve = [&](Vec& dir) {
    if (!analyzed) {
      ldlt.analyzePattern(hess);
      analyzed = true;
    }
    ldlt.factorize(hess);
    double shift = 0.0;
    const double scale = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
    while (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
      shift = shift == 0.0 ? 1e-14 * scale : 10.0 * shift;
      if (shift > scale) return false;
      SpMat shifted = hess;
      for (int f = 0; f < shifted.rows(); ++f) shifted.coeffRef(f, f) += shift;
      ldlt.factorize(shifted);
    }
    dir = ldlt.solve(-grad);
    return ldlt.info() == Eigen::Success && dir.allFinite();
  };

  Vec dir;
  if (p == 2.0) {
    // Quadratic: one Newton step is exact; a second pass removes round-off.
    for (int pass = 0; pass < 2; ++pass) {
      system.assemble(phi, result.u, grad, hess);
      if (!factor_and_solve(dir)) {
        throw SolverError("linear solve failed (singular p=2 system)", result.u, max_abs(grad));
      }
      for (int f = 0; f < system.size(); ++f) result.u[idx.vertices[f]] += dir[f];
    }
    return finish(1);
  }

  // Damped Newton on the penalty `pen`; true once the step or energy test passes.
  int total = 0;
  auto newton = [&](const Penalty& pen, double step_tol, int budget) {
    double energy = regularized_energy(graph, pen, coef, result.u, include_lp);
    std::vector<double> trial(result.u);
    for (int it = 1; it <= budget; ++it) {
      ++total;
      system.assemble(pen, result.u, grad, hess);
      if (!factor_and_solve(dir)) {
        throw SolverError("Newton system could not be factorized", result.u, max_abs(grad));
      }
      const double slope = grad.dot(dir);
      if (!(slope < 0.0)) return true;
      double alpha = 1.0;
      double trial_energy = energy;
      bool accepted = false;
      while (alpha > 1e-12) {
        for (int f = 0; f < system.size(); ++f) trial[idx.vertices[f]] = result.u[idx.vertices[f]] + alpha * dir[f];
        trial_energy = regularized_energy(graph, pen, coef, trial, include_lp);
        if (trial_energy <= energy + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      // No representable decrease left: the iterate sits at round-off level.
      if (!accepted) return true;
      const double step = alpha * max_abs(dir);
      const double decrease = (energy - trial_energy) / std::max(std::abs(energy), 1e-300);
      result.u.swap(trial);
      trial = result.u;
      energy = trial_energy;
      const double scale = std::max(1.0, max_abs(result.u));
      if (step <= step_tol * scale) return true;
      if (decrease < options.energy_tolerance && step <= 1e-6 * scale) return true;
    }
    return false;
  };

  // For p < 2 the penalty curvature blows up like eps^(p-2) at zero
  // differences, which stalls Newton from rough iterates; continuation from a
  // coarse eps keeps each stage in its region of fast convergence.
  if (p < 2.0) {
    for (double eps = 0.1 * graph.h; eps > 10.0 * phi.eps; eps *= 0.1) {
      newton(Penalty{p, eps}, 1e-6, options.max_iterations);
    }
  }
  if (newton(phi, options.step_tolerance, options.max_iterations)) return finish(total);
  throw SolverError("p-energy minimization did not converge within the iteration limit", result.u, max_abs(grad));
}

MinimizeResult minimize_p_energy_above(const EnergyGraph& graph, double p, const std::vector<double>& fixed,
                                       const std::vector<double>& lower, const std::vector<double>& initial,
                                       bool include_lp, const SolverOptions& options) {
  if (lower.size() != graph.vertex_count) throw std::invalid_argument("lower bound vector has the wrong size");
  MinimizeResult current = minimize_p_energy(graph, p, fixed, initial, include_lp, options);
  const double eps = p == 2.0 ? 0.0 : options.epsilon_scale * graph.h;
  const double bound_tol = 1e-12 * std::max(1.0, max_abs(current.u));

  std::vector<std::uint8_t> active(graph.vertex_count, 0);
  bool any = false;
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (!std::isfinite(fixed[v]) && std::isfinite(lower[v]) && current.u[v] < lower[v] - bound_tol) {
      active[v] = 1;
      any = true;
    }
  }
  if (!any) return current;

  const int max_rounds = 200;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> pinned(fixed);
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (active[v] != 0) pinned[v] = lower[v];
    }
    current = minimize_p_energy(graph, p, pinned, current.u, include_lp, options);
    const auto grad = energy_gradient(graph, p, current.u, include_lp, eps);
    const double grad_tol = 1e-10 * std::max(1e-300, max_abs(grad)) + 1e-14;
    bool changed = false;
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (std::isfinite(fixed[v]) || !std::isfinite(lower[v])) continue;
      // Multiplier is the energy gradient on the contact set; positive means
      // the bound is pushing back.
      const bool keep = active[v] != 0 ? grad[v] > grad_tol : current.u[v] < lower[v] - bound_tol;
      if (keep != (active[v] != 0)) {
        active[v] = keep ? 1 : 0;
        changed = true;
      }
    }
    if (!changed) {
      const auto terms = evaluate_energy(graph, p, current.u, include_lp);
      current.energy = terms.lp + terms.gradient;
      double res = 0.0;
      for (std::size_t v = 0; v < graph.vertex_count; ++v) {
        if (!std::isfinite(fixed[v]) && active[v] == 0) res = std::max(res, std::abs(grad[v]));
      }
      current.residual = res;
      current.iterations += round;
      return current;
    }
  }
  throw SolverError("obstacle active set did not settle", current.u, current.residual);
}

namespace {

std::vector<double> to_double(const std::vector<long double>& x) {
  return std::vector<double>(x.begin(), x.end());
}

// int_0^1 phi''(a + s b) ds, evaluated without cancellation for small b.
double mean_curvature(const Penalty& phi, double a, double b) {
  if (phi.p == 2.0) return 2.0;
  const double scale = std::abs(a) + phi.eps;
  if (std::abs(b) <= 1e-6 * scale) return phi.second(a + 0.5 * b);
  return (phi.first(a + b) - phi.first(a)) / b;
}

}  // namespace

std::vector<long double> minimize_difference(const EnergyGraph& graph, double p, const std::vector<double>& u0,
                                        const std::vector<double>& shift, const std::vector<double>& initial,
                                        bool include_lp, const SolverOptions& options) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (u0.size() != graph.vertex_count || shift.size() != graph.vertex_count) {
    throw std::invalid_argument("difference solve vectors have the wrong size");
  }
  const FreeIndex idx = index_free(graph, shift);
  const int n = static_cast<int>(idx.vertices.size());
  std::vector<long double> w(graph.vertex_count, 0.0L);
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (std::isfinite(shift[v])) {
      w[v] = shift[v];
    } else if (p != 2.0 && initial.size() == graph.vertex_count && std::isfinite(initial[v])) {
      w[v] = initial[v];
    }
  }
  // Zero data shift: the difference is exactly zero.
  if (std::none_of(shift.begin(), shift.end(), [](double s) { return std::isfinite(s) && s != 0.0; })) {
    return std::vector<long double>(graph.vertex_count, 0.0L);
  }
  if (n == 0) return w;

  std::vector<double> coef(graph.edges.size());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) coef[k] = edge_coefficient(graph, graph.edges[k], p);
  const Penalty phi{p, p == 2.0 ? 0.0 : options.epsilon_scale * graph.h};

  // Residual r = grad J(u0 + w) - grad J(u0) on the free vertices, written as
  // mean-value weight times difference so it stays relative to the local
  // size of w, and the Jacobian at u0 + w. For p = 2 the weights are constant
  // and a single solve from w = 0 is exact.
  using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using LMat = Eigen::SparseMatrix<long double>;
  LVec residual(n);
  LMat jac(n, n);
  auto assemble = [&]() {
    residual.setZero();
    std::vector<Eigen::Triplet<long double>> trip;
    trip.reserve(static_cast<std::size_t>(n) + 2 * graph.edges.size());
    std::vector<long double> diag(static_cast<std::size_t>(n), 0.0L);
    if (include_lp) {
      for (int f = 0; f < n; ++f) {
        const int v = idx.vertices[f];
        if (graph.measure[v] == 0.0) continue;
        const double wv = static_cast<double>(w[v]);
        residual[f] += graph.measure[v] * mean_curvature(phi, u0[v], wv) * w[v];
        diag[f] += graph.measure[v] * phi.second(u0[v] + wv);
      }
    }
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
      const auto& e = graph.edges[k];
      const int fa = idx.of_vertex[e.a];
      const int fb = idx.of_vertex[e.b];
      if (fa < 0 && fb < 0) continue;
      const double a = u0[e.a] - u0[e.b];
      const long double b = w[e.a] - w[e.b];
      const double bd = static_cast<double>(b);
      const long double flux = coef[k] * mean_curvature(phi, a, bd) * b;
      const double d2 = coef[k] * phi.second(a + bd);
      if (fa >= 0) {
        residual[fa] += flux;
        diag[fa] += d2;
      }
      if (fb >= 0) {
        residual[fb] -= flux;
        diag[fb] += d2;
      }
      if (fa >= 0 && fb >= 0) {
        trip.emplace_back(fa, fb, -d2);
        trip.emplace_back(fb, fa, -d2);
      }
    }
    for (int f = 0; f < n; ++f) trip.emplace_back(f, f, diag[f]);
    jac.setFromTriplets(trip.begin(), trip.end());
  };

  Eigen::SimplicialLDLT<LMat> ldlt;
  bool analyzed = false;
  const int max_steps = p == 2.0 ? 1 : std::min(options.max_iterations, 100);
  for (int step = 0; step < max_steps; ++step) {
    assemble();
    if (!analyzed) {
      ldlt.analyzePattern(jac);
      analyzed = true;
    }
    ldlt.factorize(jac);
    if (ldlt.info() != Eigen::Success) throw SolverError("difference system could not be factorized", to_double(w), 0.0);
    const LVec delta = ldlt.solve(-residual);
    if (!delta.allFinite()) throw SolverError("difference solve produced non-finite values", to_double(w), 0.0);
    bool settled = true;
    for (int f = 0; f < n; ++f) {
      const int v = idx.vertices[f];
      w[v] += delta[f];
      if (std::abs(delta[f]) > 1e-10L * std::abs(w[v])) settled = false;
    }
    if (settled || p == 2.0) return w;
  }
  throw SolverError("difference solve did not settle", to_double(w), 0.0);
}

}  // namespace primelab
