#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace bdie;

TEST_CASE("parametrix operators reduce to Laplace ones scaled by a") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  const TransferErrors t = transfer_errors(d, Coefficient::affine(2.0, 1.0));
  CHECK(t.p <= 1e-13);
  CHECK(t.v <= 1e-13);
  CHECK(t.w <= 1e-13);
  CHECK(t.vb <= 1e-13);
  CHECK(t.wpb <= 1e-13);
}

TEST_CASE("boundary mass integrates to the surface area") {
  const MeshPair mesh = build_cube_mesh(2);
  const Discretization d(mesh);
  CHECK(d.mass().sum() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK((d.mass() - d.mass().transpose()).norm() == 0.0);
  const Vector ones = Vector::Ones(static_cast<Eigen::Index>(d.n_bnd()));
  CHECK((d.mass_solve(Vector(d.mass() * ones)) - ones).norm() <= 1e-12);
}

TEST_CASE("double layer of a constant density is a solid angle") {
  // exact for a closed polyhedral surface, up to quadrature
  const MeshPair mesh = build_ball_mesh(1);
  const Discretization d(mesh);
  const ScalarField one = [](const Point3&) { return 1.0; };
  CHECK(double_layer_point(d, Point3(0.1, -0.2, 0.05), one).value == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(double_layer_point(d, Point3(2.0, 0.5, 0.0), one).value) <= 1e-6);
  CHECK(double_layer_point(d, Point3(0.0, 0.0, 0.0), one).grad.norm() <= 1e-6);
}

TEST_CASE("sphere oracles improve under refinement") {
  const MeshPair coarse = build_ball_mesh(1);
  const MeshPair fine = build_ball_mesh(2);
  const Discretization dc(coarse), df(fine);
  const SphereOracles c = sphere_oracles(dc);
  const SphereOracles f = sphere_oracles(df);
  CHECK(f.v_center < c.v_center);
  // the double layer of a constant is exact on polyhedra
  CHECK(c.wb_one <= 1e-12);
  CHECK(f.wb_one <= 1e-12);
  CHECK(f.wpb_one < c.wpb_one);
  CHECK(f.v_center <= 5e-2);
  CHECK(f.w_interior <= 1e-6);
  CHECK(f.w_exterior <= 1e-6);
}

TEST_CASE("single layer of the unit density at the ball centre") {
  const MeshPair mesh = build_ball_mesh(2);
  const Discretization d(mesh);
  const ScalarField one = [](const Point3&) { return 1.0; };
  // area / (4 pi) at distance one, less the inscribed polyhedron's deficit
  const ValueGrad v = single_layer_point(d, Point3(0, 0, 0), one);
  CHECK(v.value == doctest::Approx(1.0).epsilon(5e-2));
  CHECK(v.grad.norm() <= 1e-8);
}

TEST_CASE("matrix dump round trip") {
  const std::string path = "test_potentials_matrix.bin";
  PotentialMatrix pm{OpTag::Wpb, Matrix::Random(3, 5)};
  save_matrix(path, pm);
  const PotentialMatrix back = load_matrix(path);
  CHECK(back.tag == OpTag::Wpb);
  CHECK(back.m == pm.m);
  {
    std::ofstream junk(path, std::ios::binary);
    junk << "not a matrix";
  }
  CHECK_THROWS_AS(load_matrix(path), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_matrix("no_such_file.bin"), Error);
}
