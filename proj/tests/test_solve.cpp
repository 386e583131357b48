#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <random>

using namespace bdie;

namespace {

Matrix random_matrix(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("LU solve") {
  Matrix a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  const Vector x = Vector::LinSpaced(3, 1.0, 3.0);
  CHECK((lu_solve(a, a * x) - x).norm() <= 1e-14);
  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(lu_solve(singular, x), Error);
  CHECK_THROWS_AS(lu_solve(a, Vector::Ones(2)), Error);
}

TEST_CASE("GMRES on a well conditioned system") {
  const Matrix a = Matrix::Identity(40, 40) * 10.0 + random_matrix(40, 7);
  const Vector x = Vector::Ones(40);
  const GmresResult r = gmres_solve(a, a * x, 1e-12);
  CHECK(r.converged);
  CHECK(r.relative_residual <= 1e-12);
  CHECK((r.x - x).norm() <= 1e-9);
  CHECK(solver_path_from_id("gmres") == SolverPath::gmres);
  CHECK_THROWS_AS(solver_path_from_id("cg"), Error);
}

TEST_CASE("smallest singular value estimate") {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 3.0, 1.0, 2.0;
  const SigmaEstimate s = sigma_min(diag);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));

  const Matrix a = random_matrix(30, 11);
  const SigmaEstimate r = sigma_min(a);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(sigma_min_svd(a)).epsilon(1e-8));

  // nearly equal smallest values
  Matrix clustered = Matrix::Identity(50, 50);
  clustered.diagonal().head(3) << 0.1, 0.1001, 0.1002;
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(50, 3)).householderQ();
  const SigmaEstimate c = sigma_min(q * clustered * q.transpose());
  CHECK(c.converged);
  CHECK(c.value == doctest::Approx(0.1).epsilon(1e-8));

  Matrix zero_pivot = Matrix::Identity(3, 3);
  zero_pivot(2, 2) = 0.0;
  CHECK(sigma_min(zero_pivot).value == 0.0);
}

TEST_CASE("Dirichlet and Neumann solves on a coarse cube") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const ManufacturedCase c = find_case("M1");
  OperatorSet ops(d, c.a);
  const BoundaryData data = c.data(d);
  const Vector exact = domain_nodal(d, c.u_exact);

  const DirichletSolution dir = solve_dirichlet(SystemKind::D1, ops, data);
  CHECK(relative_l2_error(d, dir.u, exact) <= 5e-2);
  CHECK(dir.trace_mismatch <= 5e-2 * data.phi0.lpNorm<Eigen::Infinity>());
  CHECK(dir.report.residual_norm <= 1e-10);

  const NeumannSolution neu = solve_neumann(SystemKind::N1, ops, data);
  CHECK(neu.report.kind == SystemKind::N1Hat);
  CHECK(std::abs(neu.boundary_mean) <= 1e-8);
  CHECK(mean_matched_l2_error(d, neu.u, exact) <= 1e-1);
  CHECK_THROWS_AS(solve_dirichlet(SystemKind::N1, ops, data), Error);
}
