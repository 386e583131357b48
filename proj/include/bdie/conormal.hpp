#pragma once

#include "bdie/potentials.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace bdie {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Zero extension of f plus an optional boundary-supported part gamma* mu.
struct SourceData {
  ScalarField f;  // empty means f = 0
  Vector mu;      // boundary nodal density; empty means no boundary part

  static SourceData zero() { return {}; }
  static SourceData of(ScalarField f) { return {std::move(f), {}}; }
  bool has_boundary_part() const { return mu.size() > 0; }
};

enum class LiftingKind { hat, harmonic };
LiftingKind lifting_from_id(const std::string& id);
const char* to_string(LiftingKind kind) noexcept;

// Right inverse of the trace on P1 fields: columns are domain fields whose
// traces are the boundary hat functions.
class Lifting {
 public:
  Lifting(const Discretization& d, LiftingKind kind);
  LiftingKind kind() const noexcept { return kind_; }
  const Matrix& matrix() const noexcept { return m_; }
  Vector apply(const Vector& w) const { return m_ * w; }
  // tets on which some lifted hat is nonzero
  const std::vector<bool>& active_tets() const noexcept { return active_; }

 private:
  LiftingKind kind_;
  Matrix m_;
  std::vector<bool> active_;
};

// Per-tet integrals of a vector flux field.
using FluxVectors = std::vector<Point3>;

// P1 matrices on the domain mesh.
SparseMatrix stiffness(const Discretization& d);
SparseMatrix weighted_stiffness(const Discretization& d, const Coefficient& a);
// Entries int lambda_j grad(a).grad(lambda_k): the weak form of A^grad.
SparseMatrix gradient_coupling(const Discretization& d, const Coefficient& a);
SparseMatrix domain_mass(const Discretization& d);
// Boundary trace selection (n_bnd x n_dom).
SparseMatrix trace_matrix(const Discretization& d);
Vector trace_of(const Discretization& d, const Vector& u);

// <f~, lambda_k> over all domain hats.
Vector source_functional(const Discretization& d, const SourceData& src);
// Moments int g lambda_k with an analytic integrand.
Vector source_moments(const Discretization& d, const ScalarField& g);
// sum_K grad(lambda_k).c_K
Vector flux_functional(const Discretization& d, const FluxVectors& flux);
FluxVectors flux_of_field(const Discretization& d, const Vector& u, const Coefficient& a);

// c_K = int_K grad(P_Delta f), or int_K a grad(P_Delta f / a) when a is given,
// on the active tets (others are zero).
FluxVectors newton_flux(const Discretization& d, const ScalarField& f, const Coefficient* a,
                        const std::vector<bool>& active);
// Moments of R* f against domain hats on the active tets.
Vector remainder_star_moments(const Discretization& d, const ScalarField& f, const Coefficient& a,
                              const std::vector<bool>& active);

// Classical conormal a nu.grad(u) as a Galerkin functional (dual vector) and
// mass-averaged to nodal values.
using VectorField = std::function<Point3(const Point3&)>;
Vector classical_conormal_dual(const Discretization& d, const Coefficient& a, const VectorField& grad_u);
Vector classical_conormal(const Discretization& d, const Coefficient& a, const VectorField& grad_u);
// One-sided P1 gradient from the tet owning each panel.
Vector classical_conormal(const Discretization& d, const Coefficient& a, const Vector& u);

// Generalized conormal derivative as a dual vector: L^T (<f~, .> + E(u, .)).
Vector weak_conormal(const Discretization& d, const SourceData& src, const FluxVectors& flux, const Lifting& lift);
Vector weak_conormal(const Discretization& d, const SourceData& src, const Vector& u, const Coefficient& a,
                     const Lifting& lift);
// Matrix (n_bnd x n_dom) of u -> T_Delta(A^grad u; a R u) in the dual basis.
// remainder_at_vertices is R collocated at the domain vertices.
Matrix weak_conormal_aux(const Discretization& d, const Coefficient& a, const Matrix& remainder_at_vertices,
                         const Lifting& lift);
// Same operator through the potential chain; an independent oracle.
Matrix conormal_aux_chain(const Discretization& d, const Coefficient& a);

// Dual norm induced by the boundary mass matrix.
double dual_norm(const Discretization& d, const Vector& functional);

// r(y) = u(y) + R u(y) - V psi(y) + W phi(y) - P f~(y) with psi, phi nodal.
Vector third_green_residual(const Discretization& d, const Coefficient& a, const EvalPoints& y, const Vector& u_at_y,
                            const Vector& u, const Vector& psi, const Vector& phi, const SourceData& src);
// <T u, gamma v> - <f~, v> - E(u, v) with T u given as a dual vector.
double first_green_residual(const Discretization& d, const Coefficient& a, const Vector& u, const SourceData& src,
                            const Vector& conormal_dual, const Vector& v);
// <T u, gamma v> - <T v, gamma u> - <f~_u, v> + <f~_v, u>
double second_green_residual(const Discretization& d, const Vector& u, const SourceData& src_u,
                             const Vector& conormal_u, const Vector& v, const SourceData& src_v,
                             const Vector& conormal_v);

}  // namespace bdie
