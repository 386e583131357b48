#pragma once

#include "bdie/solve.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bdie {

// ---- manufactured solutions ----

struct ManufacturedCase {
  std::string id;
  Coefficient a;
  ScalarField u_exact;
  VectorField grad_u;
  ScalarField f;  // div(a grad u)
  bool source_free = false;

  // Classical conormal a nu.grad(u).
  double psi0(const Point3& x, const Point3& normal) const;
  SourceData source() const;
  // Source, nodal trace and mass-averaged classical conormal on the mesh.
  BoundaryData data(const Discretization& d) const;
};

// M0 (a = 1, harmonic), M1 (a = 2 + x1), M2 (a = e^x1).
std::vector<ManufacturedCase> builtin_cases();
ManufacturedCase find_case(const std::string& id);

// "cube": unit cube [0,1]^3 with level cells per edge; "ball": unit ball at the origin.
MeshPair build_mesh(const std::string& shape, int level);
// Fixed interior points, well away from the boundary.
std::vector<Point3> interior_probes(const std::string& shape);
// P1 interpolation of a domain field; throws when a point lies outside every tet.
Vector interpolate_domain(const Discretization& d, const Vector& u, std::span<const Point3> pts);

// ---- CSV reports ----

enum class Status { pass, fail, warn, info };
const char* to_string(Status s) noexcept;

// A row passes when error <= tolerance. Lower-bound checks (rates, ratios) store
// the measured value, the required minimum as reference and the shortfall as error.
struct CsvRow {
  std::string suite;
  std::string name;
  int level = 0;
  double h = 0.0;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  Status status = Status::info;
};
using Rows = std::vector<CsvRow>;

CsvRow bound_row(std::string suite, std::string name, int level, double h, double value, double reference,
                 double error, double tolerance);
CsvRow at_least_row(std::string suite, std::string name, int level, double h, double value, double minimum);
CsvRow info_row(std::string suite, std::string name, int level, double h, double value);

void write_csv(std::ostream& out, std::span<const CsvRow> rows);
// True when no row failed; warn and info rows do not count.
bool all_passed(std::span<const CsvRow> rows);

// ---- tolerances and study configuration ----

using Tolerances = std::map<std::string, double>;
Tolerances default_tolerances();
double tolerance(const Tolerances& tol, const std::string& name);

struct StudyConfig {
  std::string case_id = "M1";
  SystemKind system = SystemKind::D1;
  std::string shape = "cube";
  std::vector<int> levels;  // strictly increasing
  Tolerances tolerances = default_tolerances();
  std::string output;  // empty: standard output
  SolverPath solver = SolverPath::lu;
  LiftingKind lifting = LiftingKind::hat;
  bool stabilize = true;
};

// Line-oriented `key = value` pairs, `#` starts a comment. Keys: case, system,
// shape, levels (comma or space separated), output, solver, lifting, stabilize,
// tol.<name>.
StudyConfig parse_study_config(std::istream& in);
StudyConfig load_study_config(const std::string& path);

// ---- measurements ----

// Errors of layer-potential oracles on a sphere mesh.
struct SphereOracles {
  double v_center = 0.0;    // |V_Delta[1](0) - 1|
  double w_interior = 0.0;  // max |W_Delta[1] + 1| at interior points
  double w_exterior = 0.0;  // max |W_Delta[1]| at exterior points
  double wb_one = 0.0;      // nodal max of |W_Delta[1] + 1/2| / (1/2)
  double wpb_one = 0.0;     // relative boundary L2 error of W'_Delta[1] = -1/2
  double l_one = 0.0;       // max |L_Delta[1]| over the largest absolute row sum
};
SphereOracles sphere_oracles(const Discretization& d);

// Relative errors of the transfer relations between parametrix and Laplace operators.
struct TransferErrors {
  double p = 0.0, v = 0.0, w = 0.0, vb = 0.0, wpb = 0.0;
};
TransferErrors transfer_errors(const Discretization& d, const Coefficient& a);

// Richardson two-sided limits at panel centroids for a smooth density.
struct JumpErrors {
  double w = 0.0;   // gamma+ W - gamma- W + phi, relative to max |phi|
  double tv = 0.0;  // T+ V - T- V - psi, relative to max |psi|
  // T+ W - T- W - phi d_nu a, relative to max |phi d_nu a|, or to the largest
  // one-sided value when a is constant
  double tw = 0.0;
};
JumpErrors jump_errors(const Discretization& d, const Coefficient& a, const ScalarField& density);

// Max third-Green residual at the probes for the interpolated exact solution,
// with the generalized conormal derivative from the given lifting.
double third_green_case_residual(const Discretization& d, const ManufacturedCase& c, std::span<const Point3> probes,
                                 LiftingKind lifting = LiftingKind::hat);
// Max |1 + R1 + W1| at the probes.
double green_unit_residual(const Discretization& d, const Coefficient& a, std::span<const Point3> probes);
// Mass dual norm of the difference of the hat and harmonic weak conormal derivatives.
double lifting_difference(const Discretization& d, const ManufacturedCase& c);
// Max relative error of rP((rP)^{-1} g) against g at the probes.
double round_trip_error(const Discretization& d, const Coefficient& a, const ScalarField& g,
                        std::span<const Point3> probes);
// Largest |(A 1)_i| / sum_j |A_ij|.
double row_scaled_kernel_residual(const Matrix& a);

struct CaseSolve {
  SystemKind kind = SystemKind::D1;
  double error = 0.0;           // relative L2 (mean matched for Neumann kinds)
  double green_residual = 0.0;  // third-Green residual of the discrete solution at the probes
  Vector u;
  Vector boundary;              // psi for Dirichlet kinds, phi for Neumann kinds
  double shift = 0.0;
  double boundary_mean = 0.0;
  SolveReport report;
};
CaseSolve solve_case(const ManufacturedCase& c, SystemKind kind, OperatorSet& ops, const BoundaryData& data,
                     const SolveOptions& opt = {});

// ---- suites ----

// Kernel examples with closed-form values.
Rows run_kernels_check(const Tolerances& tol = default_tolerances());
Rows run_identity_suite(const std::string& shape, int level, const Tolerances& tol = default_tolerances());

struct SolveRequest {
  std::string case_id = "M1";
  SystemKind system = SystemKind::D1;
  std::string shape = "cube";
  int level = 2;
  bool stabilize = true;
  SolverPath solver = SolverPath::lu;
  LiftingKind lifting = LiftingKind::hat;
};
Rows run_solve(const SolveRequest& req, const Tolerances& tol = default_tolerances());
// Per level: h, error, third-Green residual, sigma_min and g* values; then EOC rows.
// A non-monotone error produces a warn row.
Rows run_convergence(const StudyConfig& cfg);

}  // namespace bdie
