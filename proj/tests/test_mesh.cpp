#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdie/error.hpp"
#include "bdie/mesh.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

using namespace bdie;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void check_closed(const MeshPair& mp) {
  Point3 flux = Point3::Zero();
  std::map<std::pair<int, int>, int> edges;
  for (std::size_t t = 0; t < mp.bnd.num_triangles(); ++t) {
    CHECK(mp.bnd.normals[t].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mp.bnd.areas[t] > 0.0);
    flux += mp.bnd.areas[t] * mp.bnd.normals[t];
    const auto& tr = mp.bnd.triangles[t];
    for (int i = 0; i < 3; ++i) edges[{std::min(tr[i], tr[(i + 1) % 3]), std::max(tr[i], tr[(i + 1) % 3])}]++;
  }
  CHECK(flux.norm() < 1e-12);
  for (const auto& [e, c] : edges) CHECK(c == 2);
  for (double v : mp.dom.volumes) CHECK(v > 0.0);
  CHECK(mp.dom.interior_nodes.size() + mp.bnd.num_vertices() == mp.dom.num_vertices());
}

}  // namespace

TEST_CASE("cube mesh combinatorics and measures") {
  const auto m1 = build_cube_mesh(1);
  CHECK(m1.dom.num_tets() == 6);
  CHECK(m1.bnd.num_triangles() == 12);
  CHECK(m1.bnd.total_area() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(m1.dom.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
  const auto m3 = build_cube_mesh(3);
  CHECK(m3.dom.num_tets() == 6 * 27);
  CHECK(m3.bnd.num_triangles() == 12 * 9);
  CHECK(m3.dom.interior_nodes.size() == 8);
  CHECK(m3.bnd.total_area() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(m3.dom.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  check_closed(m3);
  const Point3 center(0.5, 0.5, 0.5);
  for (std::size_t t = 0; t < m3.bnd.num_triangles(); ++t) {
    const auto c = m3.bnd.corners(t);
    CHECK(m3.bnd.normals[t].dot((c[0] + c[1] + c[2]) / 3.0 - center) > 0.0);
  }
  CHECK(build_cube_mesh(4).h == doctest::Approx(0.5 * build_cube_mesh(2).h).epsilon(1e-15));
  CHECK_THROWS_AS(build_cube_mesh(0), Error);
}

TEST_CASE("ball mesh") {
  const auto b0 = build_ball_mesh(0);
  CHECK(b0.bnd.num_triangles() == 8);
  double prev = 0.0;
  for (int level = 0; level <= 3; ++level) {
    const auto b = build_ball_mesh(level);
    const double area = b.bnd.total_area();
    CHECK(area > prev);
    CHECK(area < 4 * M_PI);
    prev = area;
    for (const auto& v : b.bnd.vertices) CHECK(std::abs(v.norm() - 1.0) <= 1e-14);
    CHECK(b.bnd.num_triangles() == 8u << (2 * level));
    CHECK(b.dom.num_tets() == 8u << (3 * level));
    check_closed(b);
    for (std::size_t t = 0; t < b.bnd.num_triangles(); ++t) {
      const auto c = b.bnd.corners(t);
      CHECK(b.bnd.normals[t].dot(c[0] + c[1] + c[2]) > 0.0);
    }
  }
  CHECK(build_ball_mesh(3).dom.total_volume() == doctest::Approx(4 * M_PI / 3).epsilon(0.05));
  CHECK_THROWS_AS(build_ball_mesh(5), Error);
}

TEST_CASE("mesh file round trip") {
  const auto path = temp_path("bdie_test_cube.mesh");
  const auto m1 = build_cube_mesh(1);
  save_mesh(path, m1);
  const auto back = load_mesh(path);
  REQUIRE(back.dom.num_vertices() == m1.dom.num_vertices());
  for (std::size_t i = 0; i < m1.dom.num_vertices(); ++i) CHECK(back.dom.vertices[i] == m1.dom.vertices[i]);
  CHECK(back.dom.tets == m1.dom.tets);
  REQUIRE(back.bnd.num_triangles() == m1.bnd.num_triangles());
  for (std::size_t t = 0; t < m1.bnd.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i)
      CHECK(back.bnd.domain_vertex[back.bnd.triangles[t][i]] == m1.bnd.domain_vertex[m1.bnd.triangles[t][i]]);
  std::remove(path.c_str());
}

TEST_CASE("mesh file errors") {
  const auto path = temp_path("bdie_test_bad.mesh");
  {
    std::ofstream out(path);
    out << "bdiemesh 1\nvertices 4\n0 0 0\n1 0 0\n";
  }
  try {
    load_mesh(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << "bdiemesh 1\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\ntets 1\n0 2 1 3\n"
        << "tris 4\n0 1 2\n0 3 1\n0 2 3\n1 3 2\n";
  }
  try {
    load_mesh(path);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
  }
  {
    std::ofstream out(path);
    out << "bdiemesh 2\n";
  }
  CHECK_THROWS_AS(load_mesh(path), Error);
  std::remove(path.c_str());
}
