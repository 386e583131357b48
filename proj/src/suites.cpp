#include "bdie/error.hpp"
#include "bdie/kernels.hpp"
#include "bdie/verify.hpp"

#include <fmt/format.h>

#include <cmath>

namespace bdie {

namespace {

constexpr double kPi = 3.14159265358979323846;

double relative_or_absolute(double value, double reference) {
  const double diff = std::abs(value - reference);
  return reference != 0.0 ? diff / std::abs(reference) : diff;
}

ScalarField jump_density() {
  return [](const Point3& x) { return 1.0 + 0.5 * x[0] + x[1] * x[2]; };
}

}  // namespace

Rows run_kernels_check(const Tolerances& tol) {
  const double t = tolerance(tol, "kernel");
  Rows rows;
  auto add = [&](const std::string& name, double value, double reference) {
    rows.push_back(bound_row("kernels", name, 0, 0.0, value, reference, relative_or_absolute(value, reference), t));
  };
  const Point3 o(0.0, 0.0, 0.0), e1(1.0, 0.0, 0.0), e2(0.0, 1.0, 0.0);
  const Coefficient one = Coefficient::constant(1.0);
  const Coefficient affine = Coefficient::affine(2.0, 1.0);
  const Coefficient expo = Coefficient::exponential(1.0);

  add("fundamental_unit", fundamental_solution(e1, o), -1.0 / (4.0 * kPi));
  const Point3 x(1.0, 2.0, 3.0), y(0.0, 0.0, 1.0);
  add("fundamental_symmetry", fundamental_solution(x, y) - fundamental_solution(y, x), 0.0);
  add("fundamental_distance2", fundamental_solution(Point3(0.0, 2.0, 0.0), o), -1.0 / (8.0 * kPi));

  add("parametrix_a2", parametrix(e1, o, affine), -1.0 / (8.0 * kPi));
  add("parametrix_a4", parametrix(e2, o, Coefficient::constant(4.0)), -1.0 / (16.0 * kPi));
  add("parametrix_identity", parametrix(x, y, one), fundamental_solution(x, y));

  add("remainder_affine", remainder_R(e1, o, affine), 1.0 / (8.0 * kPi));
  add("remainder_constant", remainder_R(x, y, Coefficient::constant(3.0)), 0.0);
  add("remainder_orthogonal", remainder_R(e2, o, affine), 0.0);

  add("remainder_star_constant", remainder_Rstar(x, y, Coefficient::constant(3.0)), 0.0);
  add("remainder_star_affine", remainder_Rstar(e1, o, affine), 1.0 / (16.0 * kPi));
  add("remainder_star_exp", remainder_Rstar(e1, o, expo), 1.0 / (4.0 * kPi));

  add("conormal_unit", double_layer_kernel(e1, e1, o, one), 1.0 / (4.0 * kPi));
  add("conormal_orthogonal", double_layer_kernel(e1, e2, o, affine), 0.0);
  // a(x) doubles from e to 2e while a(y) stays 1
  add("conormal_scaling",
      double_layer_kernel(e1, e1, o, Coefficient::exponential(1.0 + std::log(2.0))) /
          double_layer_kernel(e1, e1, o, Coefficient::exponential(1.0)),
      2.0);
  return rows;
}

Rows run_identity_suite(const std::string& shape, int level, const Tolerances& tol) {
  const MeshPair mesh = build_mesh(shape, level);
  const Discretization d(mesh);
  const double h = mesh.h;
  const std::string suite = "identities";
  Rows rows;
  const Coefficient affine = Coefficient::affine(2.0, 1.0);
  const Coefficient one = Coefficient::constant(1.0);

  const TransferErrors t = transfer_errors(d, affine);
  const double tt = tolerance(tol, "transfer");
  rows.push_back(bound_row(suite, "transfer_P", level, h, t.p, 0.0, t.p, tt));
  rows.push_back(bound_row(suite, "transfer_V", level, h, t.v, 0.0, t.v, tt));
  rows.push_back(bound_row(suite, "transfer_W", level, h, t.w, 0.0, t.w, tt));
  rows.push_back(bound_row(suite, "transfer_Vb", level, h, t.vb, 0.0, t.vb, tt));
  rows.push_back(bound_row(suite, "transfer_Wpb", level, h, t.wpb, 0.0, t.wpb, tt));

  if (shape == "ball") {
    const SphereOracles s = sphere_oracles(d);
    rows.push_back(bound_row(suite, "sphere_V1_center", level, h, 1.0 + s.v_center, 1.0, s.v_center,
                             tolerance(tol, "sphere_V1_center")));
    rows.push_back(bound_row(suite, "sphere_W1_interior", level, h, -1.0 + s.w_interior, -1.0, s.w_interior,
                             tolerance(tol, "sphere_W1_interior")));
    rows.push_back(bound_row(suite, "sphere_W1_exterior", level, h, s.w_exterior, 0.0, s.w_exterior,
                             tolerance(tol, "sphere_W1_exterior")));
    rows.push_back(bound_row(suite, "sphere_Wb1", level, h, -0.5, -0.5, s.wb_one, tolerance(tol, "sphere_Wb1")));
    rows.push_back(bound_row(suite, "sphere_Wpb1", level, h, -0.5, -0.5, s.wpb_one, tolerance(tol, "sphere_Wpb1")));
    rows.push_back(bound_row(suite, "sphere_L1", level, h, s.l_one, 0.0, s.l_one, tolerance(tol, "sphere_L1")));
  }

  for (const auto& [label, a] : {std::pair{"", one}, std::pair{"_variable", affine}}) {
    const JumpErrors j = jump_errors(d, a, jump_density());
    const std::string tw_key = a.is_constant() ? "jump_TW" : "jump_TW_variable";
    rows.push_back(bound_row(suite, std::string("jump_W") + label, level, h, j.w, 0.0, j.w, tolerance(tol, "jump_W")));
    rows.push_back(
        bound_row(suite, std::string("jump_TV") + label, level, h, j.tv, 0.0, j.tv, tolerance(tol, "jump_TV")));
    rows.push_back(bound_row(suite, std::string("jump_TW") + label, level, h, j.tw, 0.0, j.tw, tolerance(tol, tw_key)));
  }

  const std::vector<Point3> probes = interior_probes(shape);
  const double g1 = green_unit_residual(d, affine, probes);
  rows.push_back(bound_row(suite, "greenu1", level, h, g1 - 1.0, -1.0, g1, tolerance(tol, "greenu1")));
  rows.push_back(info_row(suite, "third_green_M1", level, h, third_green_case_residual(d, find_case("M1"), probes)));
  return rows;
}

namespace {

std::string row_prefix(const std::string& case_id, SystemKind kind) {
  return case_id + "/" + to_string(kind) + "/";
}

void add_solve_rows(Rows& rows, const std::string& suite, const std::string& prefix, int level, double h,
                    const CaseSolve& s, const Tolerances& tol, bool check_error) {
  const SolveReport& rep = s.report;
  if (check_error)
    rows.push_back(bound_row(suite, prefix + "error", level, h, s.error, 0.0, s.error, tolerance(tol, "solve_error")));
  else
    rows.push_back(info_row(suite, prefix + "error", level, h, s.error));
  rows.push_back(info_row(suite, prefix + "residual", level, h, rep.residual_norm));
  rows.push_back(info_row(suite, prefix + "green_residual", level, h, s.green_residual));
  rows.push_back(info_row(suite, prefix + "sigma_min", level, h, rep.sigma_min_estimate));
  if (rep.iterations > 0) rows.push_back(info_row(suite, prefix + "iterations", level, h, rep.iterations));
  for (const auto& v : rep.solvability_values) {
    CsvRow r{suite, prefix + v.name, level, h, v.value, 0.0, std::abs(v.value), rep.solvability_tolerance, Status::pass};
    if (!(r.error <= r.tolerance)) r.status = Status::warn;
    rows.push_back(r);
  }
  if (!is_dirichlet(rep.kind)) {
    rows.push_back(info_row(suite, prefix + "shift", level, h, s.shift));
    if (is_stabilized(rep.kind))
      rows.push_back(bound_row(suite, prefix + "boundary_mean", level, h, s.boundary_mean, 0.0,
                               std::abs(s.boundary_mean), tolerance(tol, "boundary_mean")));
    else
      rows.push_back(info_row(suite, prefix + "boundary_mean", level, h, s.boundary_mean));
  }
  for (const auto& w : rep.warnings) {
    std::string text = w;
    for (char& c : text)
      if (c == ',') c = ';';
    rows.push_back({suite, prefix + "warning: " + text, level, h, 0.0, 0.0, 0.0, 0.0, Status::warn});
  }
}

}  // namespace

Rows run_solve(const SolveRequest& req, const Tolerances& tol) {
  const ManufacturedCase c = find_case(req.case_id);
  const MeshPair mesh = build_mesh(req.shape, req.level);
  const Discretization d(mesh);
  OperatorSet ops(d, c.a, req.lifting);
  SolveOptions opt;
  opt.path = req.solver;
  opt.stabilize = req.stabilize;
  const CaseSolve s = solve_case(c, req.system, ops, c.data(d), opt);
  Rows rows;
  add_solve_rows(rows, "solve", row_prefix(c.id, s.report.kind), req.level, mesh.h, s, tol, true);
  return rows;
}

Rows run_convergence(const StudyConfig& cfg) {
  require(cfg.levels.size() >= 2, ErrorKind::validation, "a study needs at least two levels");
  const ManufacturedCase c = find_case(cfg.case_id);
  const std::string suite = "convergence";
  Rows rows;
  std::vector<double> hs, errors;
  std::string prefix;
  for (const int level : cfg.levels) {
    const MeshPair mesh = build_mesh(cfg.shape, level);
    const Discretization d(mesh);
    OperatorSet ops(d, c.a, cfg.lifting);
    SolveOptions opt;
    opt.path = cfg.solver;
    opt.stabilize = cfg.stabilize;
    const BoundaryData data = c.data(d);
    const CaseSolve s = solve_case(c, cfg.system, ops, data, opt);
    prefix = row_prefix(c.id, s.report.kind);
    add_solve_rows(rows, suite, prefix, level, mesh.h, s, cfg.tolerances, false);
    const SystemKind base = unstabilized(cfg.system);
    if (!is_dirichlet(base)) {
      // sigma_min of both the singular and the perturbed operator
      const BlockOperator plain = assemble_system(base, ops);
      rows.push_back(info_row(suite, prefix + "sigma_min_N", level, mesh.h, sigma_min(plain.dense()).value));
      rows.push_back(info_row(suite, prefix + "sigma_min_Nhat", level, mesh.h,
                              sigma_min(perturb_neumann(plain, ops).dense()).value));
      rows.push_back(info_row(suite, prefix + "kernel_residual", level, mesh.h,
                              row_scaled_kernel_residual(plain.dense())));
    }
    hs.push_back(mesh.h);
    errors.push_back(s.error);
  }
  const double eoc_min = tolerance(cfg.tolerances, "eoc");
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const int level = cfg.levels[i];
    if (errors[i] >= errors[i - 1]) {
      rows.push_back({suite, prefix + fmt::format("nonmonotone_error_{}_{}", cfg.levels[i - 1], level), level, hs[i],
                      errors[i], errors[i - 1], 0.0, 0.0, Status::warn});
      continue;
    }
    const double eoc = std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]);
    rows.push_back(at_least_row(suite, prefix + fmt::format("eoc_{}_{}", cfg.levels[i - 1], level), level, hs[i], eoc,
                                eoc_min));
  }
  return rows;
}

}  // namespace bdie
