#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <cmath>
#include <sstream>

using namespace bdie;

namespace {

// central differences of div(a grad u)
double fd_divergence(const ManufacturedCase& c, const Point3& x) {
  const double step = 1e-4;
  double div = 0.0;
  for (int k = 0; k < 3; ++k) {
    Point3 xp = x, xm = x;
    xp[k] += step;
    xm[k] -= step;
    div += (c.a.eval(xp) * c.grad_u(xp)[k] - c.a.eval(xm) * c.grad_u(xm)[k]) / (2.0 * step);
  }
  return div;
}

Point3 fd_gradient(const ManufacturedCase& c, const Point3& x) {
  const double step = 1e-5;
  Point3 g;
  for (int k = 0; k < 3; ++k) {
    Point3 xp = x, xm = x;
    xp[k] += step;
    xm[k] -= step;
    g[k] = (c.u_exact(xp) - c.u_exact(xm)) / (2.0 * step);
  }
  return g;
}

StudyConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_study_config(in);
}

}  // namespace

TEST_CASE("manufactured cases are consistent") {
  const std::vector<Point3> pts{{0.2, 0.3, 0.4}, {0.9, 0.1, 0.5}, {-0.5, 0.6, -0.2}};
  for (const auto& c : builtin_cases()) {
    CAPTURE(c.id);
    for (const auto& x : pts) {
      CHECK((fd_gradient(c, x) - c.grad_u(x)).norm() <= 1e-8);
      CHECK(c.f(x) == doctest::Approx(fd_divergence(c, x)).epsilon(1e-6));
      const Point3 n(0.0, 0.6, 0.8);
      CHECK(c.psi0(x, n) == doctest::Approx(c.a.eval(x) * n.dot(c.grad_u(x))).epsilon(1e-14));
    }
  }
  const ManufacturedCase m0 = find_case("M0");
  CHECK(m0.source_free);
  CHECK(m0.f(Point3(0.3, 0.3, 0.3)) == 0.0);
  // on the face x1 = 1: a = 3, du/dx1 = 1
  CHECK(find_case("M1").psi0(Point3(1.0, 0.4, 0.7), Point3(1, 0, 0)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(find_case("M2").u_exact(Point3(0.5, 0.1, 2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(find_case("M9"), Error);
}

TEST_CASE("probes lie inside their domains") {
  for (const char* shape : {"cube", "ball"}) {
    const MeshPair mesh = build_mesh(shape, shape == std::string("cube") ? 2 : 1);
    const Discretization d(mesh);
    const std::vector<Point3> probes = interior_probes(shape);
    const Vector u = domain_nodal(d, [](const Point3& x) { return 1.0 + x[0] - 2.0 * x[2]; });
    const Vector at = interpolate_domain(d, u, probes);
    for (std::size_t i = 0; i < probes.size(); ++i)
      CHECK(at[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(1.0 + probes[i][0] - 2.0 * probes[i][2]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_mesh("torus", 1), Error);
}

TEST_CASE("CSV rows") {
  const CsvRow ok = bound_row("s", "n", 1, 0.5, 1.0, 1.0, 1e-3, 1e-3);
  CHECK(ok.status == Status::pass);
  CHECK(bound_row("s", "n", 1, 0.5, 1.0, 1.0, 2e-3, 1e-3).status == Status::fail);
  CHECK(bound_row("s", "n", 1, 0.5, NAN, 1.0, NAN, 1e-3).status == Status::fail);
  const CsvRow low = at_least_row("s", "rate", 2, 0.25, 1.5, 2.0);
  CHECK(low.status == Status::fail);
  CHECK(low.error == doctest::Approx(0.5));
  CHECK(at_least_row("s", "rate", 2, 0.25, 2.5, 2.0).status == Status::pass);
  CHECK(info_row("s", "x", 0, 0.0, 3.0).status == Status::info);

  Rows rows{ok, info_row("s", "x", 0, 0.0, 3.0)};
  CHECK(all_passed(rows));
  rows.push_back(low);
  CHECK_FALSE(all_passed(rows));

  std::ostringstream out;
  write_csv(out, Rows{ok});
  CHECK(out.str() ==
        "# bdie-csv 1\n"
        "suite,name,level,h,value,reference,error,tolerance,status\n"
        "s,n,1,5.000000e-01,1.000000000e+00,1.000000000e+00,1.000e-03,1.000e-03,pass\n");
}

TEST_CASE("study config") {
  const StudyConfig cfg = parse(
      "# refinement study\n"
      "case = M2\n"
      "system = n1\n"
      "shape = ball\n"
      "levels = 1, 2 3\n"
      "solver = gmres\n"
      "lifting = harmonic\n"
      "stabilize = no\n"
      "tol.eoc = 0.8  # relaxed\n");
  CHECK(cfg.case_id == "M2");
  CHECK(cfg.system == SystemKind::N1);
  CHECK(cfg.shape == "ball");
  CHECK(cfg.levels == std::vector<int>{1, 2, 3});
  CHECK(cfg.solver == SolverPath::gmres);
  CHECK(cfg.lifting == LiftingKind::harmonic);
  CHECK_FALSE(cfg.stabilize);
  CHECK(tolerance(cfg.tolerances, "eoc") == 0.8);
  CHECK(tolerance(cfg.tolerances, "solve_error") == 5e-2);

  CHECK_THROWS_AS(parse("levels = 1 2\ncolour = red\n"), Error);
  CHECK_THROWS_AS(parse("levels = 1 2\ntol.made_up = 1\n"), Error);
  CHECK_THROWS_AS(parse("levels = 2 2\n"), Error);
  CHECK_THROWS_AS(parse("levels = 2\n"), Error);
  CHECK_THROWS_AS(parse("levels = 1 x\n"), Error);
  CHECK_THROWS_AS(parse("levels = 1 2\nshape = torus\n"), Error);
  CHECK_THROWS_AS(load_study_config("no_such_config.txt"), Error);
  CHECK_THROWS_AS(tolerance(default_tolerances(), "made_up"), Error);
}

TEST_CASE("kernel checks pass") {
  const Rows rows = run_kernels_check();
  CHECK(rows.size() == 15);
  for (const auto& r : rows) {
    CAPTURE(r.name);
    CHECK(r.status == Status::pass);
  }
}

TEST_CASE("convergence study on coarse cubes") {
  StudyConfig cfg;
  cfg.case_id = "M1";
  cfg.system = SystemKind::D2Delta;
  cfg.levels = {1, 2};
  const Rows rows = run_convergence(cfg);
  bool has_eoc = false;
  for (const auto& r : rows) has_eoc = has_eoc || r.name.find("eoc_1_2") != std::string::npos;
  CHECK(has_eoc);
}
