#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/kernels.hpp"

#include <cmath>
#include <random>

using namespace bdie;

namespace {
const Point3 kOrigin(0, 0, 0);
const Point3 kE1(1, 0, 0);
}  // namespace

TEST_CASE("fundamental solution values") {
  CHECK(fundamental_solution(kE1, kOrigin) == doctest::Approx(-7.957747154594767e-2).epsilon(1e-14));
  const Point3 x(1, 2, 3), y(0, 0, 1);
  CHECK(fundamental_solution(x, y) == fundamental_solution(y, x));
  CHECK(fundamental_solution(Point3(2, 0, 0), kOrigin) == doctest::Approx(-1.0 / (8 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(fundamental_solution(kE1, kE1), Error);
}

TEST_CASE("parametrix scales by a(y)") {
  CHECK(parametrix(kE1, kOrigin, Coefficient::constant(2.0)) == doctest::Approx(-1.0 / (8 * M_PI)).epsilon(1e-14));
  CHECK(parametrix(kE1, kOrigin, Coefficient::constant(4.0)) == doctest::Approx(-1.0 / (16 * M_PI)).epsilon(1e-14));
  const auto one = Coefficient::constant(1.0);
  const Point3 x(0.3, -0.2, 0.9), y(0.1, 0.4, -0.5);
  CHECK(parametrix(x, y, one) == fundamental_solution(x, y));
  const auto aff = Coefficient::from_id("affine");
  CHECK(aff.eval(y) * parametrix(x, y, aff) == doctest::Approx(fundamental_solution(x, y)).epsilon(1e-15));
  CHECK_THROWS_AS(parametrix(y, y, aff), Error);
}

TEST_CASE("remainder kernels") {
  const auto aff = Coefficient::from_id("affine");
  CHECK(remainder_R(kE1, kOrigin, aff) == doctest::Approx(1.0 / (8 * M_PI)).epsilon(1e-14));
  CHECK(remainder_R(kE1, kOrigin, Coefficient::constant(3.0)) == 0.0);
  CHECK(remainder_R(Point3(0, 1, 0), kOrigin, aff) == 0.0);
  CHECK(remainder_Rstar(kE1, kOrigin, Coefficient::constant(3.0)) == 0.0);
  // -1/(16 pi) from the log-Laplacian, +1/(8 pi) from the gradient term
  CHECK(remainder_Rstar(kE1, kOrigin, aff) == doctest::Approx(1.0 / (16 * M_PI)).epsilon(1e-14));
  CHECK(remainder_Rstar(kE1, kOrigin, Coefficient::from_id("exp")) ==
        doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(remainder_R(kE1, kE1, aff), Error);
  CHECK_THROWS_AS(remainder_Rstar(kE1, kE1, aff), Error);
}

TEST_CASE("R* matches -div_y(P grad a) by central differences") {
  const auto exp_a = Coefficient::from_id("exp");
  const auto aff = Coefficient::from_id("affine");
  const Point3 x(0.4, -0.3, 0.8);
  for (const auto* a : {&exp_a, &aff}) {
    for (const Point3& y : {Point3(-0.2, 0.1, 0.3), Point3(0.9, 0.5, -0.4)}) {
      const double h = 1e-4;
      double div = 0.0;
      for (int k = 0; k < 3; ++k) {
        Point3 yp = y, ym = y;
        yp[k] += h;
        ym[k] -= h;
        div += (parametrix(x, yp, *a) * a->grad(yp)[k] - parametrix(x, ym, *a) * a->grad(ym)[k]) / (2 * h);
      }
      CHECK(remainder_Rstar(x, y, *a) == doctest::Approx(-div).epsilon(1e-6));
    }
  }
}

TEST_CASE("double layer kernel") {
  const auto one = Coefficient::constant(1.0);
  CHECK(double_layer_kernel(kE1, kE1, kOrigin, one) == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-14));
  CHECK(double_layer_kernel(kE1, Point3(0, 0, 1), kOrigin, one) == 0.0);
  // a = 2 + x1: a(x) doubles from x1=0 to x1=2 at fixed a(y)
  const auto aff = Coefficient::from_id("affine");
  const Point3 y(-1.0, 0.5, 0.0), nu(0, 1, 0);
  const double v0 = double_layer_kernel(Point3(0, 1, 0), nu, y, aff);
  const double v2 = double_layer_kernel(Point3(2, 1, 0), nu, y, aff);
  const double r0 = (Point3(0, 1, 0) - y).norm(), r2 = (Point3(2, 1, 0) - y).norm();
  CHECK(v2 * std::pow(r2, 3) == doctest::Approx(2.0 * v0 * std::pow(r0, 3)).epsilon(1e-14));
  CHECK_THROWS_AS(double_layer_kernel(kE1, kE1, kE1, one), Error);
}

TEST_CASE("R equals grad a times grad_x P by finite differences") {
  const auto a = Coefficient::from_id("poly:1,0.3;2,0,0.1;1.5,-0.2");
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const Point3 x(u(gen), u(gen), u(gen)), y(u(gen), u(gen), u(gen));
    if ((x - y).norm() < 0.2) continue;
    const double h = 1e-5;
    Point3 g;
    for (int i = 0; i < 3; ++i) {
      Point3 e = Point3::Zero();
      e[i] = h;
      g[i] = (parametrix(x + e, y, a) - parametrix(x - e, y, a)) / (2 * h);
    }
    CHECK(remainder_R(x, y, a) == doctest::Approx(a.grad(x).dot(g)).epsilon(1e-6));
  }
}

TEST_CASE("kernel homogeneity at frozen coefficient") {
  const auto a = Coefficient::constant(2.5);
  const Point3 y(0.1, 0.2, 0.3), d(0.4, -0.3, 0.5), nu = Point3(1, 2, 2) / 3.0;
  const double t = 0.37;
  CHECK(fundamental_solution(y + t * d, y) == doctest::Approx(fundamental_solution(y + d, y) / t).epsilon(1e-14));
  CHECK(parametrix(y + t * d, y, a) == doctest::Approx(parametrix(y + d, y, a) / t).epsilon(1e-14));
  CHECK(double_layer_kernel(y + t * d, nu, y, a) ==
        doctest::Approx(double_layer_kernel(y + d, nu, y, a) / (t * t)).epsilon(1e-13));
}

TEST_CASE("coefficient derivatives match finite differences") {
  for (const char* id : {"affine", "exp", "exp:0.7", "poly:1,0.3,-0.1;2,0,0.1;1.5,-0.2", "const:3"}) {
    CAPTURE(id);
    const auto a = Coefficient::from_id(id);
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const double h = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
      const Point3 x(u(gen), u(gen), u(gen));
      double lap = 0.0;
      for (int i = 0; i < 3; ++i) {
        Point3 e = Point3::Zero();
        e[i] = h;
        const double fp = a.eval(x + e), fm = a.eval(x - e), f0 = a.eval(x);
        CHECK(std::abs((fp - fm) / (2 * h) - a.grad(x)[i]) < 1e-6);
        lap += (fp - 2 * f0 + fm) / (h * h);
      }
      CHECK(std::abs(lap - a.laplacian(x)) < 1e-6 * std::max(1.0, std::abs(a.laplacian(x))) + 1e-5);
      CHECK(a.eval(x) >= a.a_min());
      CHECK(a.eval(x) <= a.a_max());
    }
  }
}

TEST_CASE("coefficient ids") {
  CHECK(Coefficient::from_id("one").is_constant());
  CHECK(Coefficient::from_id("affine").eval(Point3(1, 0, 0)) == 3.0);
  CHECK(Coefficient::from_id("affine").a_min() > 0.0);
  CHECK_THROWS_AS(Coefficient::from_id("nonsense"), Error);
  CHECK_THROWS_AS(Coefficient::from_id("affine:1"), Error);
  CHECK_THROWS_AS(Coefficient::from_id("affine:0,1"), Error);  // not positive on the box
  CHECK_THROWS_AS(Coefficient::from_id("const:-1"), Error);
}
