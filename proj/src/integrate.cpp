#include "bdie/integrate.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace bdie {

TetGeom::TetGeom(const std::array<Point3, 4>& corners) : v(corners) {
  centroid = 0.25 * (v[0] + v[1] + v[2] + v[3]);
  for (int i = 0; i < 4; ++i) {
    radius = std::max(radius, (v[i] - centroid).norm());
    for (int j = i + 1; j < 4; ++j) diam = std::max(diam, (v[i] - v[j]).norm());
  }
  Eigen::Matrix3d e;
  e.col(0) = v[1] - v[0];
  e.col(1) = v[2] - v[0];
  e.col(2) = v[3] - v[0];
  volume = std::abs(e.determinant()) / 6.0;
  jinv = e.inverse();
}

std::array<double, 4> TetGeom::bary(const Point3& y) const {
  const Eigen::Vector3d l = jinv * (y - v[0]);
  return {1.0 - l[0] - l[1] - l[2], l[0], l[1], l[2]};
}

TriGeom::TriGeom(const std::array<Point3, 3>& corners, const Point3& unit_normal) : v(corners), normal(unit_normal) {
  centroid = (v[0] + v[1] + v[2]) / 3.0;
  for (int i = 0; i < 3; ++i) {
    radius = std::max(radius, (v[i] - centroid).norm());
    diam = std::max(diam, (v[i] - v[(i + 1) % 3]).norm());
  }
  const Point3 e1 = v[1] - v[0], e2 = v[2] - v[0];
  area = 0.5 * e1.cross(e2).norm();
  Eigen::Matrix2d gram;
  gram << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
  gram_inv_ = gram.inverse();
}

std::array<double, 3> TriGeom::bary(const Point3& y) const {
  const Point3 d = y - v[0];
  const Eigen::Vector2d rhs(d.dot(v[1] - v[0]), d.dot(v[2] - v[0]));
  const Eigen::Vector2d l = gram_inv_ * rhs;
  return {1.0 - l[0] - l[1], l[0], l[1]};
}

std::vector<TetGeom> tet_geometry(const DomainMesh& dom) {
  std::vector<TetGeom> out;
  out.reserve(dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) out.emplace_back(dom.corners(k));
  return out;
}

std::vector<TriGeom> tri_geometry(const BoundaryMesh& bnd) {
  std::vector<TriGeom> out;
  out.reserve(bnd.num_triangles());
  for (std::size_t t = 0; t < bnd.num_triangles(); ++t) out.emplace_back(bnd.corners(t), bnd.normals[t]);
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("BDIE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bdie
