#pragma once

#include "bdie/integrate.hpp"
#include "bdie/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bdie {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Where a potential is evaluated. Boundary sites select the limiting value the
// layer potentials take there.
struct EvalPoint {
  enum class Site {
    interior,         // strictly inside or outside the domain
    boundary_vertex,  // mesh vertex on the boundary; interior limit
    boundary_face,    // point inside a panel; direct value (mean of the two limits)
  };
  Point3 x = Point3::Zero();
  Site site = Site::interior;
  int bvertex = -1;
  int tri = -1;
  std::array<double, 3> bary{};
  Point3 normal = Point3::Zero();
  double weight = 0.0;  // surface quadrature weight for boundary_face points
};
using EvalPoints = std::vector<EvalPoint>;

EvalPoints domain_vertex_points(const MeshPair& mesh);
EvalPoints boundary_quadrature_points(const MeshPair& mesh, int degree);
EvalPoints free_points(std::span<const Point3> pts);

enum class OpTag { P, R, Rstar, V, W, Vb, Wb, Wpb, Lb, Other };
const char* to_string(OpTag tag) noexcept;

struct PotentialMatrix {
  OpTag tag = OpTag::Other;
  Matrix m;
};

// Scalar density weight on boundary panels, e.g. the normal derivative of a.
using PanelWeight = std::function<double(const Point3& x, std::size_t tri)>;

// Shared geometry and cached Laplace matrices for one mesh pair. The cached
// matrices do not depend on the coefficient.
class Discretization {
 public:
  explicit Discretization(const MeshPair& mesh, QuadOptions opt = {});
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const MeshPair& mesh() const noexcept { return mesh_; }
  const QuadOptions& options() const noexcept { return opt_; }
  const std::vector<TetGeom>& tets() const noexcept { return tets_; }
  const std::vector<TriGeom>& tris() const noexcept { return tris_; }
  // Constant gradients of the four hat functions on each tetrahedron.
  const std::vector<std::array<Point3, 4>>& tet_gradients() const noexcept { return grads_; }
  const EvalPoints& vertex_points() const noexcept { return vertex_points_; }
  const EvalPoints& surface_points() const noexcept { return surface_points_; }
  std::size_t n_dom() const noexcept { return mesh_.dom.num_vertices(); }
  std::size_t n_bnd() const noexcept { return mesh_.bnd.num_vertices(); }

  // Boundary P1 mass matrix and its Cholesky solve.
  const Matrix& mass() const noexcept { return mass_; }
  Vector mass_solve(const Vector& rhs) const;
  Matrix mass_solve(const Matrix& rhs) const;

  // Galerkin test: rows are boundary hat functions, columns follow E whose rows
  // are the surface quadrature points; entry sum_q w_q rho(y_q) lambda_i(y_q) E(q,:).
  Matrix galerkin_test(const Matrix& e, const std::function<double(const EvalPoint&)>& rho = {}) const;
  Vector galerkin_test(const Vector& e, const std::function<double(const EvalPoint&)>& rho = {}) const;
  // Weighted mass matrix with entries (rho lambda_j, lambda_i).
  Matrix weighted_mass(const std::function<double(const EvalPoint&)>& rho) const;

  // Trace of a domain P1 field at the surface quadrature points (nq x n_dom).
  const Matrix& surface_trace() const;
  // Boundary P1 interpolation at the surface quadrature points (nq x n_bnd).
  const Matrix& surface_interp() const;

  // Cached Laplace matrices at the surface quadrature points.
  const Matrix& single_layer_at_surface() const;     // V_Delta
  const Matrix& double_layer_at_surface() const;     // mean of the two limits of W_Delta
  const Matrix& adjoint_double_at_surface() const;   // W'_Delta kernel with the point normal
  const Matrix& newton_at_surface() const;           // P_Delta on domain hats
  // Symmetrized Galerkin panel-pair integrals of 1/(4 pi r), used by the Maue form.
  const Matrix& panel_pair_single() const;
  // Cached Laplace matrices at the domain vertices.
  const Matrix& single_layer_at_vertices() const;
  const Matrix& double_layer_at_vertices() const;
  const Matrix& newton_at_vertices() const;

 private:
  const MeshPair& mesh_;
  QuadOptions opt_;
  std::vector<TetGeom> tets_;
  std::vector<TriGeom> tris_;
  std::vector<std::array<Point3, 4>> grads_;
  EvalPoints vertex_points_;
  EvalPoints surface_points_;
  Matrix mass_;
  Eigen::LLT<Matrix> mass_llt_;
  mutable std::mutex mtx_;
  mutable std::optional<Matrix> trace_, interp_, vs_, ws_, wps_, ns_, pps_, vv_, wv_, nv_;
};

// ---- Laplace-level assembly (columns: domain or boundary hat functions) ----

// 1/(4 pi r) single layer with optional panel weight on the density.
Matrix laplace_single_layer(const Discretization& d, const EvalPoints& y, const PanelWeight& weight = {});
// W_Delta with the interior limit at boundary vertices and the mean limit on panels.
Matrix laplace_double_layer(const Discretization& d, const EvalPoints& y);
// Adjoint double layer nu_y.(x-y)/(4 pi r^3); needs y.normal.
Matrix laplace_adjoint_double_layer(const Discretization& d, const EvalPoints& y, const PanelWeight& weight = {});
// Newton potential P_Delta = -1/(4 pi r) applied to domain hats.
Matrix laplace_newton(const Discretization& d, const EvalPoints& y);
// Normal derivative in y of the Newton potential applied to the divergence
// basis q_k = grad(lambda_k).grad(a) + lambda_k lap(a) of u -> div(u grad a).
Matrix laplace_newton_normal_div(const Discretization& d, const EvalPoints& y, const Coefficient& a);
// Newton potential applied to the same divergence basis.
Matrix laplace_newton_div(const Discretization& d, const EvalPoints& y, const Coefficient& a);

// Vectors for analytic sources.
using ScalarField = std::function<double(const Point3&)>;
Vector newton_of_source(const Discretization& d, const EvalPoints& y, const ScalarField& f);
// Normal derivative (y.normal) of the Newton potential of f.
Vector newton_normal_of_source(const Discretization& d, const EvalPoints& y, const ScalarField& f);
Vector remainder_star_of_source(const Discretization& d, const EvalPoints& y, const Coefficient& a,
                                const ScalarField& f);
Vector remainder_of_source(const Discretization& d, const EvalPoints& y, const Coefficient& a,
                           const ScalarField& f);

// Off-surface evaluation with analytic densities: value and gradient in y.
struct ValueGrad {
  double value = 0.0;
  Point3 grad = Point3::Zero();
};
ValueGrad single_layer_point(const Discretization& d, const Point3& y, const ScalarField& density);
ValueGrad double_layer_point(const Discretization& d, const Point3& y, const ScalarField& density);

// ---- Parametrix-based operators ----

PotentialMatrix assemble_volume_P(const Discretization& d, const EvalPoints& y, const Coefficient& a);
PotentialMatrix assemble_remainder_R(const Discretization& d, const EvalPoints& y, const Coefficient& a);
PotentialMatrix assemble_remainder_Rstar(const Discretization& d, const EvalPoints& y, const Coefficient& a);
PotentialMatrix assemble_single_layer_V(const Discretization& d, const EvalPoints& y, const Coefficient& a);
PotentialMatrix assemble_double_layer_W(const Discretization& d, const EvalPoints& y, const Coefficient& a);

// Galerkin boundary operators (rows: boundary hats, columns: boundary hats).
PotentialMatrix assemble_boundary_V(const Discretization& d, const Coefficient& a);
PotentialMatrix assemble_boundary_W(const Discretization& d, const Coefficient& a);
PotentialMatrix assemble_boundary_Wprime(const Discretization& d, const Coefficient& a);
PotentialMatrix assemble_boundary_L(const Discretization& d, const Coefficient& a);
// Laplace versions.
Matrix boundary_V_laplace(const Discretization& d);
Matrix boundary_W_laplace(const Discretization& d);
// rho weights the density: entries <W'_Delta(rho lambda_j), lambda_i>.
Matrix boundary_Wprime_laplace(const Discretization& d, const std::function<double(const EvalPoint&)>& rho = {});
Matrix boundary_L_laplace(const Discretization& d);

// Nodal values of a at the boundary vertices.
Vector boundary_nodal(const Discretization& d, const ScalarField& f);
Vector domain_nodal(const Discretization& d, const ScalarField& f);
double normal_derivative(const Coefficient& a, const EvalPoint& y);

// Galerkin functionals of the one-sided traces and conormal derivatives.
struct OneSided {
  Vector plus;
  Vector minus;
};
OneSided trace_of_single_layer(const Discretization& d, const Coefficient& a, const Vector& psi);
OneSided trace_of_double_layer(const Discretization& d, const Coefficient& a, const Vector& phi);
OneSided conormal_of_single_layer(const Discretization& d, const Coefficient& a, const Vector& psi);
OneSided conormal_of_double_layer(const Discretization& d, const Coefficient& a, const Vector& phi);

// Raw dump: magic, op tag, rows, cols, then row-major little-endian doubles.
void save_matrix(const std::string& path, const PotentialMatrix& pm);
PotentialMatrix load_matrix(const std::string& path);

}  // namespace bdie
