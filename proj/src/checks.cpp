#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <algorithm>
#include <cmath>

namespace bdie {

namespace {

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double relative_max(const Matrix& x, const Matrix& ref) {
  const double scale = ref.cwiseAbs().maxCoeff();
  return (x - ref).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

Vector at_points(const EvalPoints& y, const ScalarField& f) {
  Vector v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(y[i].x);
  return v;
}

}  // namespace

SphereOracles sphere_oracles(const Discretization& d) {
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  const Vector one = Vector::Ones(nb);
  SphereOracles s;
  const std::vector<Point3> inside{{0.0, 0.0, 0.0}, {0.3, -0.2, 0.1}};
  const std::vector<Point3> outside{{2.0, 0.0, 0.0}, {0.0, 1.3, 0.9}};
  const Vector v_in = laplace_single_layer(d, free_points(inside)) * one;
  const Vector w_in = laplace_double_layer(d, free_points(inside)) * one;
  const Vector w_out = laplace_double_layer(d, free_points(outside)) * one;
  s.v_center = std::abs(v_in[0] - 1.0);
  s.w_interior = max_abs(w_in.array() + 1.0);
  s.w_exterior = max_abs(w_out);

  const Vector wb = d.mass_solve(Vector(boundary_W_laplace(d) * one));
  s.wb_one = max_abs(wb.array() + 0.5) / 0.5;
  const Vector wp = d.mass_solve(Vector(boundary_Wprime_laplace(d) * one));
  const Vector e = wp.array() + 0.5;
  s.wpb_one = std::sqrt(e.dot(d.mass() * e) / (0.25 * one.dot(d.mass() * one)));
  const Matrix l = boundary_L_laplace(d);
  s.l_one = max_abs(l * one) / l.cwiseAbs().rowwise().sum().maxCoeff();
  return s;
}

TransferErrors transfer_errors(const Discretization& d, const Coefficient& a) {
  // a copy of the vertex points bypasses the cached matrices
  const EvalPoints y = d.vertex_points();
  const Vector ay = at_points(y, [&](const Point3& x) { return a.eval(x); });
  const Vector ab = boundary_nodal(d, [&](const Point3& x) { return a.eval(x); });
  TransferErrors t;
  t.p = relative_max(ay.asDiagonal() * assemble_volume_P(d, d.vertex_points(), a).m, laplace_newton(d, y));
  t.v = relative_max(ay.asDiagonal() * assemble_single_layer_V(d, d.vertex_points(), a).m,
                     laplace_single_layer(d, y));
  t.w = relative_max(ay.asDiagonal() * assemble_double_layer_W(d, d.vertex_points(), a).m * ab.cwiseInverse().asDiagonal(),
                     laplace_double_layer(d, y));

  const auto& sp = d.surface_points();
  const Vector inv_a = at_points(sp, [&](const Point3& x) { return 1.0 / a.eval(x); });
  Vector dna_over_a(inv_a.size());
  for (std::size_t q = 0; q < sp.size(); ++q)
    dna_over_a[static_cast<Eigen::Index>(q)] = normal_derivative(a, sp[q]) / a.eval(sp[q].x);
  t.vb = relative_max(assemble_boundary_V(d, a).m, d.galerkin_test(Matrix(inv_a.asDiagonal() * d.single_layer_at_surface())));
  t.wpb = relative_max(assemble_boundary_Wprime(d, a).m,
                       boundary_Wprime_laplace(d) -
                           d.galerkin_test(Matrix(dna_over_a.asDiagonal() * d.single_layer_at_surface())));
  return t;
}

JumpErrors jump_errors(const Discretization& d, const Coefficient& a, const ScalarField& density) {
  const auto& tris = d.tris();
  const std::size_t stride = std::max<std::size_t>(1, tris.size() / 256);
  std::vector<std::size_t> panels;
  for (std::size_t p = 0; p < tris.size(); p += stride) panels.push_back(p);

  struct PanelJumps {
    double w, tv, tw;   // extrapolated jumps
    double phi, dn;     // density and d_nu a at the centroid
    double one_sided;   // largest |T W| on either side at the smallest offset
  };
  std::vector<PanelJumps> res(panels.size());
  const ScalarField a_phi = [&](const Point3& x) { return a.eval(x) * density(x); };
  parallel_for(panels.size(), [&](std::size_t i) {
    const TriGeom& g = tris[panels[i]];
    const Point3 c = g.centroid;
    const Point3 n = g.normal;
    const double delta = 0.05 * g.diam;
    auto conormal = [&](const ValueGrad& v, const Point3& y) {
      return n.dot(v.grad) - n.dot(a.grad(y)) / a.eval(y) * v.value;
    };
    auto jumps = [&](double t) {
      const Point3 yi = c - t * n, ye = c + t * n;
      const ValueGrad wi = double_layer_point(d, yi, a_phi), we = double_layer_point(d, ye, a_phi);
      const ValueGrad vi = single_layer_point(d, yi, density), ve = single_layer_point(d, ye, density);
      const double ti = conormal(wi, yi), te = conormal(we, ye);
      return std::array<double, 4>{wi.value / a.eval(yi) - we.value / a.eval(ye), conormal(vi, yi) - conormal(ve, ye),
                                   ti - te, std::max(std::abs(ti), std::abs(te))};
    };
    const auto f2 = jumps(2.0 * delta), f1 = jumps(delta), fh = jumps(0.5 * delta);
    auto extrapolate = [&](int k) { return (8.0 * fh[k] - 6.0 * f1[k] + f2[k]) / 3.0; };
    res[i] = {extrapolate(0), extrapolate(1), extrapolate(2), density(c), n.dot(a.grad(c)), fh[3]};
  });

  double ew = 0.0, etv = 0.0, etw = 0.0, phi_scale = 0.0, dn_scale = 0.0, side_scale = 0.0;
  for (const auto& r : res) {
    ew = std::max(ew, std::abs(r.w + r.phi));
    etv = std::max(etv, std::abs(r.tv - r.phi));
    etw = std::max(etw, std::abs(r.tw - r.dn * r.phi));
    phi_scale = std::max(phi_scale, std::abs(r.phi));
    dn_scale = std::max(dn_scale, std::abs(r.dn * r.phi));
    side_scale = std::max(side_scale, r.one_sided);
  }
  require(phi_scale > 0.0, ErrorKind::contract, "jump density vanishes at every centroid");
  JumpErrors out;
  out.w = ew / phi_scale;
  out.tv = etv / phi_scale;
  const double tw_scale = a.is_constant() ? side_scale : dn_scale;
  out.tw = etw / (tw_scale > 0.0 ? tw_scale : 1.0);
  return out;
}

double third_green_case_residual(const Discretization& d, const ManufacturedCase& c, std::span<const Point3> probes,
                                 LiftingKind lifting) {
  const Vector u = domain_nodal(d, c.u_exact);
  const Lifting lift(d, lifting);
  const SourceData src = c.source();
  const Vector psi = d.mass_solve(weak_conormal(d, src, u, c.a, lift));
  const EvalPoints y = free_points(probes);
  const Vector r = third_green_residual(d, c.a, y, at_points(y, c.u_exact), u, psi, trace_of(d, u), src);
  return max_abs(r);
}

double green_unit_residual(const Discretization& d, const Coefficient& a, std::span<const Point3> probes) {
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  const auto np = static_cast<Eigen::Index>(probes.size());
  const Vector r = third_green_residual(d, a, free_points(probes), Vector::Ones(np), Vector::Ones(nd),
                                        Vector::Zero(nb), Vector::Ones(nb), SourceData::zero());
  return max_abs(r);
}

double lifting_difference(const Discretization& d, const ManufacturedCase& c) {
  const Vector u = domain_nodal(d, c.u_exact);
  const SourceData src = c.source();
  const Vector hat = weak_conormal(d, src, u, c.a, Lifting(d, LiftingKind::hat));
  const Vector harmonic = weak_conormal(d, src, u, c.a, Lifting(d, LiftingKind::harmonic));
  return dual_norm(d, hat - harmonic);
}

double round_trip_error(const Discretization& d, const Coefficient& a, const ScalarField& g,
                        std::span<const Point3> probes) {
  OperatorSet ops(d, a);
  const InverseAnsatz ans = inverse_volume_ansatz(domain_nodal(d, g), ops);
  const EvalPoints y = free_points(probes);
  const Vector pg = volume_potential_of_ansatz(ans, ops, y);
  const Vector ref = at_points(y, g);
  return max_abs(pg - ref) / max_abs(ref);
}

double row_scaled_kernel_residual(const Matrix& a) {
  const Vector r = a * Vector::Ones(a.cols());
  const Vector scale = a.cwiseAbs().rowwise().sum();
  double out = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (scale[i] > 0.0) out = std::max(out, std::abs(r[i]) / scale[i]);
  return out;
}

CaseSolve solve_case(const ManufacturedCase& c, SystemKind kind, OperatorSet& ops, const BoundaryData& data,
                     const SolveOptions& opt) {
  const Discretization& d = ops.disc();
  const Vector exact = domain_nodal(d, c.u_exact);
  CaseSolve out;
  out.kind = kind;
  Vector psi, phi;
  if (is_dirichlet(kind)) {
    DirichletSolution sol = solve_dirichlet(kind, ops, data, opt);
    out.error = relative_l2_error(d, sol.u, exact);
    out.u = std::move(sol.u);
    out.boundary = std::move(sol.psi);
    out.report = std::move(sol.report);
    psi = out.boundary;
    phi = data.phi0;
  } else {
    NeumannSolution sol = solve_neumann(kind, ops, data, opt);
    out.error = mean_matched_l2_error(d, sol.u, exact);
    out.u = std::move(sol.u);
    out.boundary = std::move(sol.phi);
    out.shift = sol.shift;
    out.boundary_mean = sol.boundary_mean;
    out.report = std::move(sol.report);
    psi = data.psi0;
    phi = out.boundary;
  }
  const std::vector<Point3> probes = interior_probes(d.mesh().shape);
  const Vector uy = interpolate_domain(d, out.u, probes);
  out.green_residual = max_abs(third_green_residual(d, c.a, free_points(probes), uy, out.u, psi, phi, data.source));
  return out;
}

}  // namespace bdie
