#pragma once

#include "bdie/coefficient.hpp"

#include <array>
#include <functional>
#include <vector>

namespace bdie {

// Rule on the reference simplex in barycentric coordinates. Triangle weights sum
// to 1/2 and tetrahedron weights to 1/6 (the reference measures).
struct QuadratureRule {
  int dim = 2;
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
};

// 1-D Gauss-Legendre nodes and weights on [0,1].
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const LineRule& gauss_legendre01(int n);
const QuadratureRule& gauss_rule_triangle(int degree);
const QuadratureRule& gauss_rule_tet(int degree);

using ScalarKernel = std::function<double(const Point3&)>;

// Integral of kernel over the triangle (vertices tri) where the kernel is singular
// at vertex y_vertex; the Duffy map x = y + s(B − y + t(C − B)) cancels a 1/|x−y| blow-up.
double duffy_triangle_singular(const std::array<Point3, 3>& tri, int y_vertex, const ScalarKernel& kernel,
                               int order = 8);

// Integral over a tetrahedron with the singular point at vertex y_vertex, using the
// pyramidal map x = y + s(X(ξ,η) − y) whose Jacobian s² cancels O(|x−y|^{-2}) kernels.
double singular_tet_integral(const std::array<Point3, 4>& tet, int y_vertex, const ScalarKernel& kernel,
                             int order = 8);

}  // namespace bdie
