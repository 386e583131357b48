#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/assembly.hpp"
#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <cmath>

using namespace bdie;

TEST_CASE("system ids") {
  for (const char* id : {"d1", "d2delta", "d2", "n1delta", "n1", "n2", "n1deltahat", "n1hat", "n2hat"})
    CHECK(system_from_id(id) == system_from_id(id));
  CHECK(is_dirichlet(system_from_id("d2delta")));
  CHECK_FALSE(is_dirichlet(system_from_id("n1")));
  CHECK(stabilized(SystemKind::N2) == SystemKind::N2Hat);
  CHECK(unstabilized(SystemKind::N1Hat) == SystemKind::N1);
  CHECK(is_stabilized(SystemKind::N1DeltaHat));
  CHECK_THROWS_AS(system_from_id("d9"), Error);
  CHECK_THROWS_AS(stabilized(SystemKind::D1), Error);
}

TEST_CASE("domain P1 matrices") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const Vector ones = Vector::Ones(static_cast<Eigen::Index>(d.n_dom()));
  CHECK((stiffness(d) * ones).norm() <= 1e-12);
  CHECK((weighted_stiffness(d, Coefficient::affine(2.0, 1.0)) * ones).norm() <= 1e-12);
  CHECK(ones.dot(domain_mass(d) * ones) == doctest::Approx(1.0).epsilon(1e-12));
  const Vector x1 = domain_nodal(d, [](const Point3& x) { return x[0]; });
  // int grad(x1).grad(x1) over the unit cube
  CHECK(x1.dot(stiffness(d) * x1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((trace_of(d, x1) - boundary_nodal(d, [](const Point3& x) { return x[0]; })).norm() == 0.0);
}

TEST_CASE("adjoint double layer is the transpose of the double layer") {
  const MeshPair mesh = build_cube_mesh(1);
  const Discretization d(mesh);
  const Matrix w = boundary_W_laplace(d);
  const Matrix wp = boundary_Wprime_laplace(d);
  CHECK((wp - w.transpose()).norm() <= 1e-12 * w.norm());
}

TEST_CASE("block systems have the nodal shape") {
  const MeshPair mesh = build_cube_mesh(1);
  const Discretization d(mesh);
  OperatorSet ops(d, Coefficient::affine(2.0, 1.0));
  for (const auto kind : {SystemKind::D1, SystemKind::D2Delta, SystemKind::D2, SystemKind::N1Delta, SystemKind::N1,
                          SystemKind::N2}) {
    const BlockOperator op = assemble_system(kind, ops);
    CHECK(op.n_dom() == static_cast<Eigen::Index>(d.n_dom()));
    CHECK(op.n_bnd() == static_cast<Eigen::Index>(d.n_bnd()));
    const Matrix dense = op.dense();
    CHECK(dense.rows() == op.n_dom() + op.n_bnd());
    CHECK(dense.cols() == dense.rows());
    CHECK(dense.allFinite());
  }
}

TEST_CASE("equilibrium density and cokernel weights") {
  const MeshPair mesh = build_ball_mesh(1);
  const Discretization d(mesh);
  OperatorSet ops(d, Coefficient::constant(1.0));
  const CokernelWeights w = cokernel_g2_weights(ops);
  const Vector eq = w.plus + w.minus;
  const Vector ones = Vector::Ones(static_cast<Eigen::Index>(d.n_bnd()));
  // V_Delta w = 1 in the Galerkin sense
  CHECK((ops.v_gal_laplace() * eq - d.mass() * ones).norm() <= 1e-8 * (d.mass() * ones).norm());
}

TEST_CASE("stabilization removes the Neumann kernel") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  OperatorSet ops(d, Coefficient::affine(2.0, 1.0));
  const BlockOperator plain = assemble_system(SystemKind::N1, ops);
  const BlockOperator hat = perturb_neumann(plain, ops);
  CHECK(hat.kind == SystemKind::N1Hat);
  const double s_plain = sigma_min_svd(plain.dense());
  const double s_hat = sigma_min_svd(hat.dense());
  CHECK(s_hat >= 10.0 * s_plain);
  const Perturbation p = neumann_perturbation(SystemKind::N1, ops);
  CHECK(p.direction.size() == plain.dense().rows());
  CHECK(p.functional.size() == plain.dense().cols());
}

TEST_CASE("manufactured data is nearly attainable") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const ManufacturedCase c = find_case("M1");
  OperatorSet ops(d, c.a);
  const BoundaryData data = c.data(d);
  const RhsAssembly rhs = assemble_rhs(SystemKind::N2, ops, data);
  const double scale = rhs.f1.lpNorm<1>() + rhs.f2.lpNorm<1>();
  CHECK(std::abs(cokernel_g2(rhs, ops)) <= 1e-2 * scale);
}
