#pragma once

#include "bdie/assembly.hpp"

#include <string>
#include <vector>

namespace bdie {

// Dense LU with partial pivoting; an exactly zero pivot raises a solver error.
Vector lu_solve(const Matrix& a, const Vector& b);

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};
// Unpreconditioned restarted GMRES.
GmresResult gmres_solve(const Matrix& a, const Vector& b, double tol = 1e-12, int restart = 50,
                        int max_iterations = 2000);

struct SigmaEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // false: iteration cap reached, value is the last estimate
};
// Smallest singular value by block inverse iteration on A^T A, using one LU of A and a
// fixed-seed starting block.
SigmaEstimate sigma_min(const Matrix& a, int max_iterations = 2000, double rel_tol = 1e-10);
// Full Jacobi SVD; the reference for the estimate above.
double sigma_min_svd(const Matrix& a);

enum class SolverPath { lu, gmres };
SolverPath solver_path_from_id(const std::string& id);
const char* to_string(SolverPath path) noexcept;

struct SolveOptions {
  SolverPath path = SolverPath::lu;
  bool stabilize = true;          // Neumann kinds only
  bool estimate_sigma = true;
  double solvability_factor = 1e-3;  // |g*| <= factor * (|F1| + |F2|) counts as compatible
  // unstabilized least squares drops singular values below this fraction of the largest
  double rank_threshold = 1e-3;
};

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct SolveReport {
  SystemKind kind = SystemKind::D1;
  double residual_norm = 0.0;  // |A x - b| / |b| of the linear solve
  double sigma_min_estimate = 0.0;
  bool sigma_converged = true;
  double wall_time = 0.0;  // seconds, assembly included
  int iterations = 0;      // GMRES only
  double solvability_tolerance = 0.0;
  std::vector<NamedValue> solvability_values;
  std::vector<std::string> warnings;

  double value(const std::string& name) const;
};

struct DirichletSolution {
  Vector u;    // domain nodal
  Vector psi;  // boundary nodal conormal derivative
  double trace_mismatch = 0.0;  // max |gamma u - phi0|
  SolveReport report;
};

struct NeumannSolution {
  Vector u;
  Vector phi;  // boundary nodal trace
  // Stabilized solves return U0 - shift * UG with UG solving the perturbed system for the
  // perturbation direction; shift = 0 exactly when the data lie in the discrete range.
  double shift = 0.0;
  double boundary_mean = 0.0;  // g0 of the returned solution
  SolveReport report;
};

DirichletSolution solve_dirichlet(SystemKind kind, OperatorSet& ops, const BoundaryData& data,
                                  const SolveOptions& opt = {});
NeumannSolution solve_neumann(SystemKind kind, OperatorSet& ops, const BoundaryData& data,
                              const SolveOptions& opt = {});

// Mass-weighted mean of a boundary nodal field.
double boundary_mean(const Discretization& d, const Vector& boundary_field);
// |u - u_ref| / |u_ref| in the domain L2 norm of P1 fields.
double relative_l2_error(const Discretization& d, const Vector& u, const Vector& u_ref);
// Same after subtracting the boundary mean of each trace.
double mean_matched_l2_error(const Discretization& d, const Vector& u, const Vector& u_ref);

}  // namespace bdie
