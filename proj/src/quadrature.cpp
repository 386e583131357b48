#include "bdie/quadrature.hpp"

#include "bdie/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace bdie {

namespace {

LineRule make_gauss_legendre01(int n) {
  LineRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

void add_orbit3(QuadratureRule& q, double a, double b, double c, double w) {
  std::array<double, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  do {
    q.points.push_back({v[0], v[1], v[2], 0.0});
    q.weights.push_back(w);
  } while (std::next_permutation(v.begin(), v.end()));
}

void add_orbit4(QuadratureRule& q, double a, double b, double c, double d, double w) {
  std::array<double, 4> v{a, b, c, d};
  std::sort(v.begin(), v.end());
  do {
    q.points.push_back(v);
    q.weights.push_back(w);
  } while (std::next_permutation(v.begin(), v.end()));
}

// Collapsed (conical product) Gauss rule symmetrized over all vertex permutations.
QuadratureRule symmetrized_collapsed(int dim, int degree) {
  QuadratureRule base;
  base.dim = dim;
  if (dim == 2) {
    const int n = (degree + 2) / 2 + 1;
    const auto& g = gauss_legendre01(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double s = g.nodes[i], t = g.nodes[j];
        const double l1 = s, l2 = (1.0 - s) * t;
        base.points.push_back({1.0 - l1 - l2, l1, l2, 0.0});
        base.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - s));
      }
  } else {
    const int n = (degree + 3) / 2 + 1;
    const auto& g = gauss_legendre01(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double s = g.nodes[i], t = g.nodes[j], u = g.nodes[k];
          const double l1 = s, l2 = (1.0 - s) * t, l3 = (1.0 - s) * (1.0 - t) * u;
          base.points.push_back({1.0 - l1 - l2 - l3, l1, l2, l3});
          base.weights.push_back(g.weights[i] * g.weights[j] * g.weights[k] * (1.0 - s) * (1.0 - s) * (1.0 - t));
        }
  }
  // accumulate permuted copies keyed by rounded coordinates so coincident points merge
  std::map<std::array<long long, 4>, std::size_t> index;
  QuadratureRule q;
  q.dim = dim;
  q.degree = degree;
  std::array<int, 4> perm{0, 1, 2, 3};
  const int nv = dim + 1;
  int nperm = 0;
  std::vector<std::array<int, 4>> perms;
  do {
    perms.push_back(perm);
    ++nperm;
  } while (std::next_permutation(perm.begin(), perm.begin() + nv));
  for (std::size_t p = 0; p < base.size(); ++p)
    for (const auto& pm : perms) {
      std::array<double, 4> pt{0, 0, 0, 0};
      for (int v = 0; v < nv; ++v) pt[v] = base.points[p][pm[v]];
      std::array<long long, 4> key{};
      for (int v = 0; v < 4; ++v) key[v] = std::llround(pt[v] * 1e12);
      auto [it, fresh] = index.emplace(key, q.size());
      if (fresh) {
        q.points.push_back(pt);
        q.weights.push_back(0.0);
      }
      q.weights[it->second] += base.weights[p] / nperm;
    }
  return q;
}

QuadratureRule make_triangle(int degree) {
  QuadratureRule q;
  q.dim = 2;
  q.degree = degree;
  if (degree == 1) {
    q.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
    q.weights.push_back(1.0);
  } else if (degree == 2) {
    add_orbit3(q, 2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3);
  } else if (degree <= 4) {
    const double a = 0.445948490915965, b = 0.091576213509771;
    add_orbit3(q, a, a, 1 - 2 * a, 0.223381589678011);
    add_orbit3(q, b, b, 1 - 2 * b, 0.109951743655322);
  } else if (degree == 5) {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, a2 = (6.0 + s15) / 21.0;
    q.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
    q.weights.push_back(9.0 / 40.0);
    add_orbit3(q, a1, a1, 1 - 2 * a1, (155.0 - s15) / 1200.0);
    add_orbit3(q, a2, a2, 1 - 2 * a2, (155.0 + s15) / 1200.0);
  } else {
    return symmetrized_collapsed(2, degree);
  }
  for (auto& w : q.weights) w *= 0.5;
  return q;
}

QuadratureRule make_tet(int degree) {
  QuadratureRule q;
  q.dim = 3;
  q.degree = degree;
  if (degree == 1) {
    q.points.push_back({0.25, 0.25, 0.25, 0.25});
    q.weights.push_back(1.0 / 6.0);
  } else if (degree == 2) {
    const double a = (5.0 - std::sqrt(5.0)) / 20.0;
    add_orbit4(q, a, a, a, 1 - 3 * a, 1.0 / 24.0);
  } else if (degree <= 5) {
    const double a1 = 0.0927352503108912, a2 = 0.3108859192633006, b = 0.0455037041256496;
    add_orbit4(q, a1, a1, a1, 1 - 3 * a1, 0.01224884051939366);
    add_orbit4(q, a2, a2, a2, 1 - 3 * a2, 0.01878132095300264);
    add_orbit4(q, b, b, 0.5 - b, 0.5 - b, 0.007091003462846911);
  } else {
    return symmetrized_collapsed(3, degree);
  }
  return q;
}

template <class Make>
const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, int degree, Make make) {
  static std::mutex mtx;
  std::lock_guard lock(mtx);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

}  // namespace

const LineRule& gauss_legendre01(int n) {
  require(n >= 1 && n <= 64, ErrorKind::unsupported, "Gauss-Legendre order out of range");
  static std::mutex mtx;
  static std::map<int, LineRule> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre01(n)).first;
  return it->second;
}

const QuadratureRule& gauss_rule_triangle(int degree) {
  require(degree >= 1 && degree <= 10, ErrorKind::unsupported, "triangle rule degree must lie in 1..10");
  static std::map<int, QuadratureRule> cache;
  return cached(cache, degree, make_triangle);
}

const QuadratureRule& gauss_rule_tet(int degree) {
  require(degree >= 1 && degree <= 10, ErrorKind::unsupported, "tetrahedron rule degree must lie in 1..10");
  static std::map<int, QuadratureRule> cache;
  return cached(cache, degree, make_tet);
}

double duffy_triangle_singular(const std::array<Point3, 3>& tri, int y_vertex, const ScalarKernel& kernel,
                               int order) {
  require(y_vertex >= 0 && y_vertex < 3, ErrorKind::contract, "singular point must be a triangle vertex");
  const Point3& y = tri[y_vertex];
  const Point3& b = tri[(y_vertex + 1) % 3];
  const Point3& c = tri[(y_vertex + 2) % 3];
  const double jac = (b - y).cross(c - b).norm();
  const auto& g = gauss_legendre01(order);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double s = g.nodes[i], t = g.nodes[j];
      const Point3 x = y + s * ((b - y) + t * (c - b));
      sum += g.weights[i] * g.weights[j] * s * jac * kernel(x);
    }
  return sum;
}

double singular_tet_integral(const std::array<Point3, 4>& tet, int y_vertex, const ScalarKernel& kernel,
                             int order) {
  require(y_vertex >= 0 && y_vertex < 4, ErrorKind::contract, "singular point must be a tetrahedron vertex");
  const Point3& y = tet[y_vertex];
  std::array<Point3, 3> face;
  for (int k = 0, m = 0; k < 4; ++k)
    if (k != y_vertex) face[m++] = tet[k];
  Eigen::Matrix3d e;
  e.col(0) = face[0] - y;
  e.col(1) = face[1] - y;
  e.col(2) = face[2] - y;
  const double det = std::abs(e.determinant());
  const auto& g = gauss_legendre01(order);
  const auto& tr = gauss_rule_triangle(std::min(10, std::max(1, 2 * order - 2)));
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double s = g.nodes[i];
    for (std::size_t q = 0; q < tr.size(); ++q) {
      const auto& l = tr.points[q];
      const Point3 xf = l[0] * face[0] + l[1] * face[1] + l[2] * face[2];
      const Point3 x = y + s * (xf - y);
      sum += g.weights[i] * tr.weights[q] * s * s * det * kernel(x);
    }
  }
  return sum;
}

}  // namespace bdie
