#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace primelab {

/// Weighted graph carrying a discrete p-energy
///
///   J(u) = sum_v measure_v |u_v|^p + sum_e length_e^(1-p) * h * |u_a - u_b|^p,
///
/// i.e. the p-th power of the Newtonian norm with the edge difference
/// quotient |u_a - u_b| / length_e as upper gradient and edge measure
/// h^2 * (length_e / h).
struct EnergyGraph {
  struct Edge {
    int a = 0;
    int b = 0;
    double length = 0.0;
  };

  std::size_t vertex_count = 0;
  std::vector<double> measure;
  std::vector<Edge> edges;
  double h = 1.0;
};

struct SolverOptions {
  /// Stop when the accepted Newton step is below this, relative to max(1, |u|_inf).
  double step_tolerance = 1e-10;
  /// Stop when the relative energy decrease falls below this.
  double energy_tolerance = 1e-15;
  int max_iterations = 500;
  /// Regularization epsilon = epsilon_scale * h in the weights (|t|^2 + eps^2)^((p-2)/2).
  double epsilon_scale = 1e-8;
};

/// Raised when the minimizer does not converge; carries the best iterate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> best, double residual)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}
  const std::vector<double>& best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

struct MinimizeResult {
  std::vector<double> u;
  /// Exact (unregularized) energy of u.
  double energy = 0.0;
  int iterations = 0;
  /// Max-norm of the energy gradient over free vertices at u.
  double residual = 0.0;
};

struct EnergyTerms {
  double lp = 0.0;
  double gradient = 0.0;
};

/// Exact energy split into the measure and gradient parts.
EnergyTerms evaluate_energy(const EnergyGraph& graph, double p, const std::vector<double>& u, bool include_lp);

/// Gradient of the regularized energy (the exact one for p = 2).
std::vector<double> energy_gradient(const EnergyGraph& graph, double p, const std::vector<double>& u,
                                    bool include_lp, double epsilon);

/// Minimizes J over u with u_v = fixed_v wherever fixed_v is finite (NaN marks
/// a free vertex). `initial` may be empty. p = 2 is a single linear solve;
/// other p use damped Newton steps on the epsilon-regularized energy, whose
/// Hessian is the reweighted graph Laplacian.
MinimizeResult minimize_p_energy(const EnergyGraph& graph, double p, const std::vector<double>& fixed,
                                 const std::vector<double>& initial, bool include_lp, const SolverOptions& options);

/// Same with the additional constraint u_v >= lower_v (use -infinity for no
/// bound), solved by a primal-dual active-set loop around minimize_p_energy.
MinimizeResult minimize_p_energy_above(const EnergyGraph& graph, double p, const std::vector<double>& fixed,
                                       const std::vector<double>& lower, const std::vector<double>& initial,
                                       bool include_lp, const SolverOptions& options);

/// Difference w = u1 - u0 between a minimizer u0 and the minimizer u1 whose
/// fixed values are those of u0 plus `shift` (finite exactly on the fixed
/// vertices). Each pass freezes the mean-value edge weights
/// int_0^1 phi''(Du0 + s Dw) ds and solves the resulting weighted Laplacian
/// with w = shift on fixed vertices. For shift >= 0 this never subtracts
/// nearly equal numbers, so w keeps its relative accuracy where it is
/// exponentially small, unlike u1 - u0 formed from two separate solves.
/// `initial` (may be empty) seeds the weights, e.g. with u1 - u0. The result
/// is carried in long double for its wider exponent range: differences across
/// long narrow channels decay geometrically and leave the double range.
std::vector<long double> minimize_difference(const EnergyGraph& graph, double p, const std::vector<double>& u0,
                                        const std::vector<double>& shift, const std::vector<double>& initial,
                                        bool include_lp, const SolverOptions& options);

}  // namespace primelab
