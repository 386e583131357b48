#pragma once

#include "bdie/conormal.hpp"

#include <optional>
#include <string>

namespace bdie {

enum class SystemKind { D1, D2Delta, D2, N1Delta, N1, N2, N1DeltaHat, N1Hat, N2Hat };

const char* to_string(SystemKind kind) noexcept;
// Accepts d1, d2delta, d2, n1delta, n1, n2 and the hat forms n1deltahat, n1hat, n2hat.
SystemKind system_from_id(const std::string& id);
bool is_dirichlet(SystemKind kind) noexcept;
bool is_stabilized(SystemKind kind) noexcept;
SystemKind stabilized(SystemKind kind);
SystemKind unstabilized(SystemKind kind) noexcept;

// 2x2 block system. Row 1 is collocated at every domain vertex (interior limit
// at boundary vertices); row 2 is Galerkin-tested and multiplied by the inverse
// boundary mass matrix, so both rows are in nodal form.
struct BlockOperator {
  SystemKind kind = SystemKind::D1;
  Matrix a11, a12, a21, a22;

  Eigen::Index n_dom() const noexcept { return a11.rows(); }
  Eigen::Index n_bnd() const noexcept { return a22.rows(); }
  Matrix dense() const;
  Vector apply(const Vector& domain_part, const Vector& boundary_part) const;
};

struct RhsAssembly {
  SystemKind kind = SystemKind::D1;
  Vector f1;          // domain vertices
  Vector f2;          // boundary vertices, nodal form
  Vector f1_surface;  // trace of the first right-hand side at the surface quadrature points
  Vector stacked() const;
};

// Known boundary data: phi0 for Dirichlet kinds, psi0 for Neumann kinds (both nodal).
struct BoundaryData {
  SourceData source;
  Vector phi0;
  Vector psi0;
};

// Assembled operators for one mesh and coefficient, built on first use.
// Not safe for concurrent use; assembly inside each build is parallel.
class OperatorSet {
 public:
  OperatorSet(const Discretization& d, Coefficient a, LiftingKind lifting = LiftingKind::hat);
  OperatorSet(const OperatorSet&) = delete;
  OperatorSet& operator=(const OperatorSet&) = delete;

  const Discretization& disc() const noexcept { return d_; }
  const Coefficient& coefficient() const noexcept { return a_; }
  const Lifting& lifting() const noexcept { return lift_; }

  const Matrix& remainder_vertices();  // R at domain vertices
  const Matrix& single_vertices();     // V at domain vertices
  const Matrix& double_vertices();     // W at domain vertices, interior limit on the boundary
  const Matrix& remainder_surface();   // R at surface quadrature points
  // Galerkin boundary operators.
  const Matrix& v_gal();
  const Matrix& w_gal();
  const Matrix& wp_gal();
  const Matrix& l_gal();
  const Matrix& v_gal_laplace();
  const Matrix& wp_gal_laplace();
  const Matrix& l_gal_weighted();  // L_Delta(a .)
  const Matrix& mass_dna();        // mass matrix weighted by the normal derivative of a
  // Galerkin rows of u -> T_Delta(A^grad u; a R u) and u -> T R u.
  const Matrix& aux_conormal();
  const Matrix& remainder_conormal();

  const Vector& a_boundary();
  const Vector& a_domain();

 private:
  const Discretization& d_;
  Coefficient a_;
  Lifting lift_;
  std::optional<Matrix> rv_, vv_, wv_, rs_, vg_, wg_, wpg_, lg_, vgl_, wpgl_, lgw_, mdna_, aux_, trem_;
  std::optional<Vector> ab_, ad_;
};

BlockOperator assemble_system(SystemKind kind, OperatorSet& ops);
RhsAssembly assemble_rhs(SystemKind kind, OperatorSet& ops, const BoundaryData& data);

// Rank-one stabilization U -> g0(U) z with g0(U) = mean of the boundary density.
struct Perturbation {
  Vector direction;   // z, stacked (domain; boundary)
  Vector functional;  // g0 as a row over the stacked unknowns
};
Perturbation neumann_perturbation(SystemKind kind, OperatorSet& ops);
BlockOperator perturb_neumann(const BlockOperator& op, OperatorSet& ops);

// Solvability functionals; they vanish on attainable right-hand sides.
double cokernel_g1Delta(const RhsAssembly& rhs, OperatorSet& ops);
double cokernel_g1(const RhsAssembly& rhs, OperatorSet& ops);
double cokernel_g2(const RhsAssembly& rhs, OperatorSet& ops);
// Densities of g*2 with w the equilibrium density (V_Delta w = 1):
// g*2(F) = -<a plus, gamma F1> - <a minus, F2>.
struct CokernelWeights {
  Vector plus;   // (1/2 + W'_Delta) w, nodal
  Vector minus;  // (1/2 - W'_Delta) w, nodal
};
CokernelWeights cokernel_g2_weights(OperatorSet& ops);

// Weak data of (rP)^{-1} g: <f~, w> = -int grad(v).grad(w) - int_Gamma tau w.
struct InverseAnsatz {
  Vector v;    // domain nodal, zero on the boundary
  Vector tau;  // boundary nodal
};
InverseAnsatz inverse_volume_ansatz(const Vector& g, OperatorSet& ops);
// P f~ at interior points for f~ given by the ansatz.
Vector volume_potential_of_ansatz(const InverseAnsatz& ans, OperatorSet& ops, const EvalPoints& y);

}  // namespace bdie
