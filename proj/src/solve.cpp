#include "bdie/solve.hpp"

#include "bdie/error.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <chrono>
#include <random>

namespace bdie {

namespace {

double relative_residual(const Matrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  return (a * x - b).norm() / (nb > 0.0 ? nb : 1.0);
}

bool has_zero_pivot(const Eigen::PartialPivLU<Matrix>& lu) {
  const auto diag = lu.matrixLU().diagonal();
  return (diag.array() == 0.0).any() || !diag.allFinite();
}

struct LinearResult {
  Vector x;
  int iterations = 0;
};

LinearResult solve_square(const Matrix& a, const Vector& b, SolverPath path, std::vector<std::string>& warnings) {
  if (path == SolverPath::lu) return {lu_solve(a, b), 0};
  GmresResult g = gmres_solve(a, b);
  if (!g.converged) warnings.push_back("GMRES stopped at the iteration cap");
  return {std::move(g.x), g.iterations};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void fill_sigma(SolveReport& rep, const Matrix& a, const SolveOptions& opt) {
  if (!opt.estimate_sigma) return;
  const SigmaEstimate s = sigma_min(a);
  rep.sigma_min_estimate = s.value;
  rep.sigma_converged = s.converged;
  if (!s.converged) rep.warnings.push_back("sigma_min estimate did not converge");
}

constexpr Eigen::Index kSigmaBlock = 8;

}  // namespace

Vector lu_solve(const Matrix& a, const Vector& b) {
  require(a.rows() == a.cols(), ErrorKind::contract, "LU needs a square matrix");
  require(a.rows() == b.size(), ErrorKind::contract, "right-hand side length does not match the matrix");
  require(a.allFinite() && b.allFinite(), ErrorKind::contract, "LU input is not finite");
  const Eigen::PartialPivLU<Matrix> lu(a);
  require(!has_zero_pivot(lu), ErrorKind::solver, "matrix is singular (zero pivot)");
  return lu.solve(b);
}

GmresResult gmres_solve(const Matrix& a, const Vector& b, double tol, int restart, int max_iterations) {
  require(a.rows() == a.cols() && a.rows() == b.size(), ErrorKind::contract, "GMRES needs a square system");
  Eigen::GMRES<Matrix, Eigen::IdentityPreconditioner> gmres;
  gmres.set_restart(restart);
  gmres.setTolerance(tol);
  gmres.setMaxIterations(max_iterations);
  gmres.compute(a);
  GmresResult out;
  out.x = gmres.solve(b);
  out.iterations = static_cast<int>(gmres.iterations());
  out.relative_residual = relative_residual(a, out.x, b);
  out.converged = gmres.info() == Eigen::Success;
  return out;
}

SigmaEstimate sigma_min(const Matrix& a, int max_iterations, double rel_tol) {
  require(a.rows() == a.cols(), ErrorKind::contract, "sigma_min needs a square matrix");
  SigmaEstimate est;
  if (a.rows() == 0) return est;
  const Eigen::PartialPivLU<Matrix> lu(a);
  if (has_zero_pivot(lu)) {
    est.converged = true;
    return est;
  }
  // Subspace iteration on (A^T A)^{-1} with Rayleigh-Ritz; a block keeps clustered
  // smallest singular values from stalling the iteration.
  const Eigen::Index block = std::min<Eigen::Index>(kSigmaBlock, a.rows());
  std::mt19937 rng(20240917u);
  std::normal_distribution<double> normal;
  Matrix x(a.rows(), block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) x(i, j) = normal(rng);
  x = Eigen::HouseholderQR<Matrix>(x).householderQ() * Matrix::Identity(a.rows(), block);
  double lambda_inv = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Matrix z = lu.solve(Matrix(lu.transpose().solve(x)));
    if (!z.allFinite()) {
      est.iterations = it;
      est.converged = true;
      return est;
    }
    Matrix ritz = x.transpose() * z;
    ritz = 0.5 * (ritz + ritz.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(ritz);
    const double next = eig.eigenvalues()(block - 1);  // largest Ritz value of (A^T A)^{-1}
    x = Eigen::HouseholderQR<Matrix>(z * eig.eigenvectors()).householderQ() * Matrix::Identity(a.rows(), block);
    est.iterations = it;
    if (it > 1 && std::abs(next - lambda_inv) <= rel_tol * std::abs(next)) {
      est.converged = true;
      lambda_inv = next;
      break;
    }
    lambda_inv = next;
  }
  est.value = lambda_inv > 0.0 ? 1.0 / std::sqrt(lambda_inv) : 0.0;
  return est;
}

double sigma_min_svd(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

SolverPath solver_path_from_id(const std::string& id) {
  if (id == "lu") return SolverPath::lu;
  if (id == "gmres") return SolverPath::gmres;
  fail(ErrorKind::usage, "unknown solver '" + id + "'");
}

const char* to_string(SolverPath path) noexcept { return path == SolverPath::lu ? "lu" : "gmres"; }

double SolveReport::value(const std::string& name) const {
  for (const auto& v : solvability_values)
    if (v.name == name) return v.value;
  fail(ErrorKind::contract, "report has no value named '" + name + "'");
}

DirichletSolution solve_dirichlet(SystemKind kind, OperatorSet& ops, const BoundaryData& data,
                                  const SolveOptions& opt) {
  require(is_dirichlet(kind), ErrorKind::unsupported, std::string(to_string(kind)) + " is not a Dirichlet system");
  const Stopwatch clock;
  const Discretization& d = ops.disc();
  const BlockOperator op = assemble_system(kind, ops);
  const RhsAssembly rhs = assemble_rhs(kind, ops, data);
  const Matrix a = op.dense();
  const Vector b = rhs.stacked();

  DirichletSolution sol;
  sol.report.kind = kind;
  const LinearResult lin = solve_square(a, b, opt.path, sol.report.warnings);
  sol.report.iterations = lin.iterations;
  sol.report.residual_norm = relative_residual(a, lin.x, b);
  sol.u = lin.x.head(op.n_dom());
  sol.psi = lin.x.tail(op.n_bnd());
  sol.trace_mismatch = (trace_of(d, sol.u) - data.phi0).cwiseAbs().maxCoeff();
  fill_sigma(sol.report, a, opt);
  sol.report.wall_time = clock.seconds();
  return sol;
}

NeumannSolution solve_neumann(SystemKind kind, OperatorSet& ops, const BoundaryData& data, const SolveOptions& opt) {
  const SystemKind base = unstabilized(kind);
  require(!is_dirichlet(base), ErrorKind::unsupported, std::string(to_string(kind)) + " is not a Neumann system");
  const bool stab = opt.stabilize || is_stabilized(kind);
  const Stopwatch clock;
  const Discretization& d = ops.disc();
  const BlockOperator plain = assemble_system(base, ops);
  const RhsAssembly rhs = assemble_rhs(base, ops, data);
  const Vector b = rhs.stacked();

  NeumannSolution sol;
  SolveReport& rep = sol.report;
  rep.kind = stab ? stabilized(base) : base;
  rep.solvability_tolerance = opt.solvability_factor * (rhs.f1.norm() + rhs.f2.norm());
  double g = 0.0;
  switch (base) {
    case SystemKind::N1Delta: g = cokernel_g1Delta(rhs, ops); rep.solvability_values.push_back({"g1Delta", g}); break;
    case SystemKind::N1: g = cokernel_g1(rhs, ops); rep.solvability_values.push_back({"g1", g}); break;
    default: g = cokernel_g2(rhs, ops); rep.solvability_values.push_back({"g2", g}); break;
  }
  if (std::abs(g) > rep.solvability_tolerance)
    rep.warnings.push_back("right-hand side fails the solvability condition");

  Vector x;
  Matrix a;
  if (stab) {
    const Perturbation p = neumann_perturbation(base, ops);
    a = perturb_neumann(plain, ops).dense();
    const LinearResult u0 = solve_square(a, b, opt.path, rep.warnings);
    const LinearResult ug = solve_square(a, p.direction, opt.path, rep.warnings);
    rep.iterations = u0.iterations + ug.iterations;
    rep.residual_norm = std::max(relative_residual(a, u0.x, b), relative_residual(a, ug.x, p.direction));
    const double g_ug = p.functional.dot(ug.x);
    require(g_ug != 0.0, ErrorKind::solver, "perturbation direction is invisible to the mean functional");
    sol.shift = p.functional.dot(u0.x) / g_ug;
    x = u0.x - sol.shift * ug.x;
    sol.boundary_mean = p.functional.dot(x);
  } else {
    a = plain.dense();
    if (opt.path == SolverPath::gmres) rep.warnings.push_back("unstabilized systems use least squares, not GMRES");
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(opt.rank_threshold);
    x = svd.solve(b);
    rep.residual_norm = relative_residual(a, x, b);
    sol.boundary_mean = boundary_mean(d, x.tail(plain.n_bnd()));
  }
  sol.u = x.head(plain.n_dom());
  sol.phi = x.tail(plain.n_bnd());
  fill_sigma(rep, a, opt);
  rep.wall_time = clock.seconds();
  return sol;
}

double boundary_mean(const Discretization& d, const Vector& boundary_field) {
  require(static_cast<std::size_t>(boundary_field.size()) == d.n_bnd(), ErrorKind::contract,
          "boundary mean needs a boundary field");
  return Vector::Ones(boundary_field.size()).dot(d.mass() * boundary_field) / d.mesh().bnd.total_area();
}

double relative_l2_error(const Discretization& d, const Vector& u, const Vector& u_ref) {
  const SparseMatrix m = domain_mass(d);
  const Vector e = u - u_ref;
  const double ref = u_ref.dot(m * u_ref);
  require(ref > 0.0, ErrorKind::contract, "reference field has zero norm");
  return std::sqrt(std::max(0.0, e.dot(m * e)) / ref);
}

double mean_matched_l2_error(const Discretization& d, const Vector& u, const Vector& u_ref) {
  const Vector uc = u.array() - boundary_mean(d, trace_of(d, u));
  const Vector rc = u_ref.array() - boundary_mean(d, trace_of(d, u_ref));
  return relative_l2_error(d, uc, rc);
}

}  // namespace bdie
