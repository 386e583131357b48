#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/mesh.hpp"
#include "bdie/quadrature.hpp"

#include <cmath>

using namespace bdie;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("Gauss-Legendre on [0,1]") {
  for (int n : {1, 2, 5, 12, 30}) {
    const auto& g = gauss_legendre01(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre01(0), Error);
}

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int deg = 1; deg <= 10; ++deg) {
    CAPTURE(deg);
    const auto& q = gauss_rule_triangle(deg);
    for (double w : q.weights) CHECK(w > 0.0);
    for (int p = 0; p <= deg; ++p)
      for (int r = 0; p + r <= deg; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
          s += q.weights[i] * std::pow(q.points[i][1], p) * std::pow(q.points[i][2], r);
        const double exact = factorial(p) * factorial(r) / factorial(p + r + 2);
        CHECK(std::abs(s - exact) <= 1e-12 * exact);
      }
  }
  CHECK_THROWS_AS(gauss_rule_triangle(0), Error);
  CHECK_THROWS_AS(gauss_rule_triangle(11), Error);
}

TEST_CASE("reference moments") {
  const auto& q = gauss_rule_triangle(4);
  double one = 0.0, xi = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    one += q.weights[i];
    xi += q.weights[i] * q.points[i][1];
  }
  CHECK(one == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(xi == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  double vol = 0.0;
  for (double w : gauss_rule_tet(4).weights) vol += w;
  CHECK(vol == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("tetrahedron rules integrate monomials exactly") {
  for (int deg = 1; deg <= 10; ++deg) {
    CAPTURE(deg);
    const auto& q = gauss_rule_tet(deg);
    for (double w : q.weights) CHECK(w > 0.0);
    for (int p = 0; p <= deg; ++p)
      for (int r = 0; p + r <= deg; ++r)
        for (int s = 0; p + r + s <= deg; ++s) {
          double sum = 0.0;
          for (std::size_t i = 0; i < q.size(); ++i)
            sum += q.weights[i] * std::pow(q.points[i][1], p) * std::pow(q.points[i][2], r) *
                   std::pow(q.points[i][3], s);
          const double exact = factorial(p) * factorial(r) * factorial(s) / factorial(p + r + s + 3);
          CHECK(std::abs(sum - exact) <= 1e-12 * exact);
        }
  }
  CHECK_THROWS_AS(gauss_rule_tet(11), Error);
}

TEST_CASE("Duffy triangle integrals") {
  const std::array<Point3, 3> tri{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)};
  auto inv_r = [](const Point3& x) { return 1.0 / x.norm(); };
  CHECK(duffy_triangle_singular(tri, 0, inv_r, 20) ==
        doctest::Approx(std::sqrt(2.0) * std::log(1.0 + std::sqrt(2.0))).epsilon(1e-10));
  CHECK(duffy_triangle_singular(tri, 2, [](const Point3&) { return 1.0; }) == doctest::Approx(0.5).epsilon(1e-14));
  const double t = 2.5;
  const std::array<Point3, 3> big{t * tri[0], t * tri[1], t * tri[2]};
  CHECK(duffy_triangle_singular(big, 0, inv_r, 12) ==
        doctest::Approx(t * duffy_triangle_singular(tri, 0, inv_r, 12)).epsilon(1e-12));
  CHECK_THROWS_AS(duffy_triangle_singular(tri, 3, inv_r), Error);
}

TEST_CASE("singular tetrahedron integrals") {
  const std::array<Point3, 4> tet{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)};
  CHECK(singular_tet_integral(tet, 1, [](const Point3&) { return 1.0; }) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(singular_tet_integral(tet, -1, [](const Point3&) { return 1.0; }), Error);

  // cones over a fine sphere triangulation: the flat facets make the error O(h^2)
  const auto mesh = build_ball_mesh(4);
  double i1 = 0.0, i2 = 0.0;
  for (std::size_t t = 0; t < mesh.bnd.num_triangles(); ++t) {
    const auto c = mesh.bnd.corners(t);
    const std::array<Point3, 4> cone{Point3::Zero(), c[0], c[1], c[2]};
    i1 += singular_tet_integral(cone, 0, [](const Point3& x) { return 1.0 / x.norm(); });
    i2 += singular_tet_integral(cone, 0, [](const Point3& x) { return 1.0 / x.squaredNorm(); });
  }
  CHECK(i1 == doctest::Approx(2 * M_PI).epsilon(5e-3));
  CHECK(i2 == doctest::Approx(4 * M_PI).epsilon(5e-3));
}
