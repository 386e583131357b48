#pragma once

#include "bdie/mesh.hpp"
#include "bdie/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>

namespace bdie {

struct QuadOptions {
  int tri_degree = 4;
  int tet_degree = 4;
  // a cell is near-singular when |y - centroid| < near_factor * diameter
  double near_factor = 2.0;
  double tet_near_factor = 1.0;
  int tri_max_depth = 7;
  int tet_max_depth = 3;
  int duffy_order = 8;       // Gauss points per direction on singular triangles
  int radial_order = 5;      // Gauss points along the ray of a singular tetrahedron
  int angular_degree = 5;    // triangle rule degree on the base of a singular tetrahedron
};

struct TetGeom {
  std::array<Point3, 4> v;
  Point3 centroid;
  double radius = 0.0;
  double diam = 0.0;
  double volume = 0.0;
  Eigen::Matrix3d jinv;

  explicit TetGeom(const std::array<Point3, 4>& corners);
  std::array<double, 4> bary(const Point3& y) const;
};

struct TriGeom {
  std::array<Point3, 3> v;
  Point3 centroid;
  Point3 normal;
  double radius = 0.0;
  double diam = 0.0;
  double area = 0.0;

  TriGeom(const std::array<Point3, 3>& corners, const Point3& unit_normal);
  // barycentrics of the orthogonal projection of y onto the triangle's plane
  std::array<double, 3> bary(const Point3& y) const;
  double plane_distance(const Point3& y) const { return normal.dot(y - v[0]); }

 private:
  Eigen::Matrix2d gram_inv_;
};

std::vector<TetGeom> tet_geometry(const DomainMesh& dom);
std::vector<TriGeom> tri_geometry(const BoundaryMesh& bnd);

inline constexpr double kClosureTol = 1e-10;

namespace detail {

template <std::size_t N>
using BaryCorners = std::array<std::array<double, N>, N>;

template <std::size_t N>
std::array<double, N> bary_mid(const std::array<double, N>& a, const std::array<double, N>& b) {
  std::array<double, N> m;
  for (std::size_t i = 0; i < N; ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

template <class F>
void tri_cell(const TriGeom& g, const BaryCorners<3>& c, double cell_area, const Point3& y, const QuadOptions& opt,
              int depth, F& f) {
  std::array<Point3, 3> x;
  for (int k = 0; k < 3; ++k) x[k] = c[k][0] * g.v[0] + c[k][1] * g.v[1] + c[k][2] * g.v[2];
  const Point3 centroid = (x[0] + x[1] + x[2]) / 3.0;
  const double diam = std::max({(x[0] - x[1]).norm(), (x[1] - x[2]).norm(), (x[2] - x[0]).norm()});
  if (depth < opt.tri_max_depth && (y - centroid).norm() < opt.near_factor * diam) {
    const auto m01 = bary_mid(c[0], c[1]), m12 = bary_mid(c[1], c[2]), m20 = bary_mid(c[2], c[0]);
    const double a = 0.25 * cell_area;
    tri_cell(g, {c[0], m01, m20}, a, y, opt, depth + 1, f);
    tri_cell(g, {m01, c[1], m12}, a, y, opt, depth + 1, f);
    tri_cell(g, {m20, m12, c[2]}, a, y, opt, depth + 1, f);
    tri_cell(g, {m01, m12, m20}, a, y, opt, depth + 1, f);
    return;
  }
  const auto& q = gauss_rule_triangle(opt.tri_degree);
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::array<double, 3> lam{};
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) lam[j] += q.points[i][k] * c[k][j];
    const Point3 xp = lam[0] * g.v[0] + lam[1] * g.v[1] + lam[2] * g.v[2];
    f(xp, 2.0 * q.weights[i] * cell_area, lam);
  }
}

template <class F>
void tet_cell(const TetGeom& g, const BaryCorners<4>& c, double cell_vol, const Point3& y, const QuadOptions& opt,
              int depth, F& f) {
  std::array<Point3, 4> x;
  for (int k = 0; k < 4; ++k) x[k] = c[k][0] * g.v[0] + c[k][1] * g.v[1] + c[k][2] * g.v[2] + c[k][3] * g.v[3];
  const Point3 centroid = 0.25 * (x[0] + x[1] + x[2] + x[3]);
  double diam = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) diam = std::max(diam, (x[i] - x[j]).norm());
  if (depth < opt.tet_max_depth && (y - centroid).norm() < opt.tet_near_factor * diam) {
    std::array<std::array<double, 4>, 6> m;  // 01 02 03 12 13 23
    m[0] = bary_mid(c[0], c[1]);
    m[1] = bary_mid(c[0], c[2]);
    m[2] = bary_mid(c[0], c[3]);
    m[3] = bary_mid(c[1], c[2]);
    m[4] = bary_mid(c[1], c[3]);
    m[5] = bary_mid(c[2], c[3]);
    const double v8 = cell_vol / 8.0;
    tet_cell(g, {c[0], m[0], m[1], m[2]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[0], c[1], m[3], m[4]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[1], m[3], c[2], m[5]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[2], m[4], m[5], c[3]}, v8, y, opt, depth + 1, f);
    // inner octahedron split along the m02-m13 diagonal
    tet_cell(g, {m[1], m[4], m[0], m[3]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[1], m[4], m[3], m[5]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[1], m[4], m[5], m[2]}, v8, y, opt, depth + 1, f);
    tet_cell(g, {m[1], m[4], m[2], m[0]}, v8, y, opt, depth + 1, f);
    return;
  }
  const auto& q = gauss_rule_tet(opt.tet_degree);
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::array<double, 4> lam{};
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) lam[j] += q.points[i][k] * c[k][j];
    const Point3 xp = lam[0] * g.v[0] + lam[1] * g.v[1] + lam[2] * g.v[2] + lam[3] * g.v[3];
    f(xp, 6.0 * q.weights[i] * cell_vol, lam);
  }
}

// Pyramid with apex y over a sub-triangle (barycentric corners c) of one tet face.
// The base is refined while y is close to it relative to its size.
template <class F>
void pyramid_cell(const Point3& y, const std::array<double, 4>& ly, const std::array<int, 3>& idx,
                  const std::array<Point3, 3>& base, const BaryCorners<3>& c, const QuadOptions& opt, int depth,
                  F& f) {
  std::array<Point3, 3> x;
  for (int k = 0; k < 3; ++k) x[k] = c[k][0] * base[0] + c[k][1] * base[1] + c[k][2] * base[2];
  const Point3 centroid = (x[0] + x[1] + x[2]) / 3.0;
  const double diam = std::max({(x[0] - x[1]).norm(), (x[1] - x[2]).norm(), (x[2] - x[0]).norm()});
  if (depth < opt.tet_max_depth && (y - centroid).norm() < opt.tet_near_factor * diam) {
    const auto m01 = bary_mid(c[0], c[1]), m12 = bary_mid(c[1], c[2]), m20 = bary_mid(c[2], c[0]);
    pyramid_cell(y, ly, idx, base, {c[0], m01, m20}, opt, depth + 1, f);
    pyramid_cell(y, ly, idx, base, {m01, c[1], m12}, opt, depth + 1, f);
    pyramid_cell(y, ly, idx, base, {m20, m12, c[2]}, opt, depth + 1, f);
    pyramid_cell(y, ly, idx, base, {m01, m12, m20}, opt, depth + 1, f);
    return;
  }
  Eigen::Matrix3d e;
  for (int m = 0; m < 3; ++m) e.col(m) = x[m] - y;
  const double det = std::abs(e.determinant());
  const auto& gl = gauss_legendre01(opt.radial_order);
  const auto& face = gauss_rule_triangle(opt.angular_degree);
  for (std::size_t q = 0; q < face.size(); ++q) {
    std::array<double, 3> mu{};
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) mu[j] += face.points[q][k] * c[k][j];
    const Point3 xf = mu[0] * base[0] + mu[1] * base[1] + mu[2] * base[2];
    for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
      const double s = gl.nodes[a];
      std::array<double, 4> lam{(1 - s) * ly[0], (1 - s) * ly[1], (1 - s) * ly[2], (1 - s) * ly[3]};
      for (int m = 0; m < 3; ++m) lam[idx[m]] += s * mu[m];
      f(y + s * (xf - y), gl.weights[a] * face.weights[q] * s * s * det, lam);
    }
  }
}

// Duffy sub-triangle with apex y over the edge piece t in [t0, t1] from vertex j to vertex k;
// the piece is halved while y is close to it.
template <class F>
void duffy_cell(const TriGeom& g, const Point3& y, const std::array<double, 3>& ly, int j, int k, double t0,
                double t1, const QuadOptions& opt, int depth, F& f) {
  const Point3 b = g.v[j] + t0 * (g.v[k] - g.v[j]);
  const Point3 c = g.v[j] + t1 * (g.v[k] - g.v[j]);
  if (depth < opt.tri_max_depth && (y - 0.5 * (b + c)).norm() < (c - b).norm()) {
    const double tm = 0.5 * (t0 + t1);
    duffy_cell(g, y, ly, j, k, t0, tm, opt, depth + 1, f);
    duffy_cell(g, y, ly, j, k, tm, t1, opt, depth + 1, f);
    return;
  }
  const auto& gl = gauss_legendre01(opt.duffy_order);
  const double jac = (b - y).cross(c - b).norm();
  for (std::size_t a = 0; a < gl.nodes.size(); ++a)
    for (std::size_t bb = 0; bb < gl.nodes.size(); ++bb) {
      const double s = gl.nodes[a], u = gl.nodes[bb];
      const double t = t0 + u * (t1 - t0);
      std::array<double, 3> lam{(1 - s) * ly[0], (1 - s) * ly[1], (1 - s) * ly[2]};
      lam[j] += s * (1 - t);
      lam[k] += s * t;
      f(y + s * ((b - y) + u * (c - b)), gl.weights[a] * gl.weights[bb] * s * jac, lam);
    }
}

}  // namespace detail

// Calls f(x, weight, barycentrics) for a quadrature of the triangle suited to a
// kernel singular at y: Duffy sub-triangles when y lies on the closed triangle,
// adaptive dyadic subdivision when y is near, the regular rule otherwise.
template <class F>
void integrate_tri(const TriGeom& g, const Point3& y, const QuadOptions& opt, F&& f) {
  const auto ly = g.bary(y);
  const bool in_plane = std::abs(g.plane_distance(y)) <= kClosureTol * g.diam;
  if (in_plane && *std::min_element(ly.begin(), ly.end()) >= -kClosureTol) {
    for (int i = 0; i < 3; ++i) {
      if (ly[i] <= kClosureTol) continue;
      detail::duffy_cell(g, y, ly, (i + 1) % 3, (i + 2) % 3, 0.0, 1.0, opt, 0, f);
    }
    return;
  }
  detail::tri_cell(g, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, g.area, y, opt, 0, f);
}

// Tetrahedron analogue: pyramidal sub-tetrahedra with apex y when y lies in the
// closed tetrahedron, adaptive red refinement when near, the regular rule otherwise.
template <class F>
void integrate_tet(const TetGeom& g, const Point3& y, const QuadOptions& opt, F&& f) {
  if ((y - g.centroid).norm() <= g.radius * (1.0 + 1e-9)) {
    const auto ly = g.bary(y);
    if (*std::min_element(ly.begin(), ly.end()) >= -kClosureTol) {
      for (int i = 0; i < 4; ++i) {
        if (ly[i] <= kClosureTol) continue;
        std::array<int, 3> idx;
        for (int k = 0, m = 0; k < 4; ++k)
          if (k != i) idx[m++] = k;
        const std::array<Point3, 3> base{g.v[idx[0]], g.v[idx[1]], g.v[idx[2]]};
        detail::pyramid_cell(y, ly, idx, base, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, opt, 0, f);
      }
      return;
    }
  }
  detail::tet_cell(g, {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}, g.volume, y, opt, 0, f);
}

// Runs body(i) for i in [0, n) on up to BDIE_THREADS worker threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
int worker_count();

}  // namespace bdie
