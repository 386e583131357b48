#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/assembly.hpp"
#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <cmath>

using namespace bdie;

namespace {

// u = x1 + 2 x2 - x3 has a constant gradient, so the weak conormal is exact.
const ScalarField kLinear = [](const Point3& x) { return x[0] + 2.0 * x[1] - x[2]; };
const VectorField kLinearGrad = [](const Point3&) { return Point3(1.0, 2.0, -1.0); };

}  // namespace

TEST_CASE("liftings are right inverses of the trace") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const SparseMatrix tr = trace_matrix(d);
  for (const auto kind : {LiftingKind::hat, LiftingKind::harmonic}) {
    const Lifting lift(d, kind);
    const Matrix id = tr * lift.matrix();
    CHECK((id - Matrix::Identity(id.rows(), id.cols())).norm() <= 1e-12);
  }
  CHECK(lifting_from_id("harmonic") == LiftingKind::harmonic);
  CHECK_THROWS_AS(lifting_from_id("smooth"), Error);
}

TEST_CASE("weak conormal of a linear field, constant coefficient") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const Coefficient one = Coefficient::constant(1.0);
  const Vector u = domain_nodal(d, kLinear);
  for (const auto kind : {LiftingKind::hat, LiftingKind::harmonic}) {
    const Lifting lift(d, kind);
    const Vector weak = weak_conormal(d, SourceData::zero(), u, one, lift);
    const Vector classical = classical_conormal_dual(d, one, kLinearGrad);
    CHECK(dual_norm(d, weak - classical) <= 1e-10 * dual_norm(d, classical));
  }
}

TEST_CASE("weak conormal with an affine coefficient and its source") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const Coefficient a = Coefficient::affine(2.0, 1.0);
  const ScalarField u_fn = [](const Point3& x) { return x[0]; };
  const VectorField grad = [](const Point3&) { return Point3(1.0, 0.0, 0.0); };
  // div((2 + x1) e1) = 1
  const SourceData src = SourceData::of([](const Point3&) { return 1.0; });
  const Vector u = domain_nodal(d, u_fn);
  const Lifting lift(d, LiftingKind::hat);
  const Vector weak = weak_conormal(d, src, u, a, lift);
  const Vector classical = classical_conormal_dual(d, a, grad);
  CHECK(dual_norm(d, weak - classical) <= 1e-10 * dual_norm(d, classical));
}

TEST_CASE("first Green identity holds for the weak conormal") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const ManufacturedCase c = find_case("M1");
  const Lifting lift(d, LiftingKind::hat);
  const Vector u = domain_nodal(d, c.u_exact);
  const Vector tu = weak_conormal(d, c.source(), u, c.a, lift);
  const Vector v = domain_nodal(d, [](const Point3& x) { return 1.0 + x[0] * x[1]; });
  CHECK(std::abs(first_green_residual(d, c.a, u, c.source(), tu, v)) <= 1e-10);
}

TEST_CASE("auxiliary conormal agrees with the potential chain") {
  // two discretizations of one operator, first order apart on a smooth surface; cube
  // edges keep the gap O(1) in this norm
  const Coefficient a = Coefficient::affine(2.0, 1.0);
  const ScalarField smooth = [](const Point3& x) { return 1.0 + x[0] * x[1] - 0.5 * x[2] * x[2]; };
  std::vector<double> gaps;
  for (const int m : {1, 2, 3}) {
    const MeshPair mesh = build_ball_mesh(m);
    const Discretization d(mesh);
    OperatorSet ops(d, a);
    const Vector u = domain_nodal(d, smooth);
    const Vector direct = ops.aux_conormal() * u;
    const Vector chain = conormal_aux_chain(d, a) * u;
    gaps.push_back(dual_norm(d, direct - chain) / dual_norm(d, chain));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  CHECK(gaps[2] <= 0.1);
}
