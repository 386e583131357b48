#include "bdie/assembly.hpp"

#include "bdie/error.hpp"
#include "bdie/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace bdie {

namespace {

template <class Build>
const Matrix& lazy(std::optional<Matrix>& slot, Build build) {
  if (!slot) slot = build();
  return *slot;
}

SystemKind base_of(SystemKind kind) noexcept { return unstabilized(kind); }

}  // namespace

const char* to_string(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::D1: return "D1";
    case SystemKind::D2Delta: return "D2Delta";
    case SystemKind::D2: return "D2";
    case SystemKind::N1Delta: return "N1Delta";
    case SystemKind::N1: return "N1";
    case SystemKind::N2: return "N2";
    case SystemKind::N1DeltaHat: return "N1DeltaHat";
    case SystemKind::N1Hat: return "N1Hat";
    case SystemKind::N2Hat: return "N2Hat";
  }
  return "?";
}

SystemKind system_from_id(const std::string& id) {
  static const std::map<std::string, SystemKind> table{
      {"d1", SystemKind::D1},           {"d2delta", SystemKind::D2Delta},       {"d2", SystemKind::D2},
      {"n1delta", SystemKind::N1Delta}, {"n1", SystemKind::N1},                 {"n2", SystemKind::N2},
      {"n1deltahat", SystemKind::N1DeltaHat}, {"n1hat", SystemKind::N1Hat},     {"n2hat", SystemKind::N2Hat}};
  std::string key;
  for (char c : id) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto it = table.find(key);
  if (it == table.end()) fail(ErrorKind::usage, "unknown system '" + id + "'");
  return it->second;
}

bool is_dirichlet(SystemKind kind) noexcept {
  return kind == SystemKind::D1 || kind == SystemKind::D2Delta || kind == SystemKind::D2;
}

bool is_stabilized(SystemKind kind) noexcept {
  return kind == SystemKind::N1DeltaHat || kind == SystemKind::N1Hat || kind == SystemKind::N2Hat;
}

SystemKind stabilized(SystemKind kind) {
  switch (kind) {
    case SystemKind::N1Delta: return SystemKind::N1DeltaHat;
    case SystemKind::N1: return SystemKind::N1Hat;
    case SystemKind::N2: return SystemKind::N2Hat;
    default: fail(ErrorKind::unsupported, std::string("no stabilized form of ") + to_string(kind));
  }
}

SystemKind unstabilized(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::N1DeltaHat: return SystemKind::N1Delta;
    case SystemKind::N1Hat: return SystemKind::N1;
    case SystemKind::N2Hat: return SystemKind::N2;
    default: return kind;
  }
}

Matrix BlockOperator::dense() const {
  Matrix out(a11.rows() + a21.rows(), a11.cols() + a12.cols());
  out << a11, a12, a21, a22;
  return out;
}

Vector BlockOperator::apply(const Vector& domain_part, const Vector& boundary_part) const {
  Vector out(a11.rows() + a21.rows());
  out << a11 * domain_part + a12 * boundary_part, a21 * domain_part + a22 * boundary_part;
  return out;
}

Vector RhsAssembly::stacked() const {
  Vector out(f1.size() + f2.size());
  out << f1, f2;
  return out;
}

OperatorSet::OperatorSet(const Discretization& d, Coefficient a, LiftingKind lifting)
    : d_(d), a_(std::move(a)), lift_(d, lifting) {}

const Vector& OperatorSet::a_boundary() {
  if (!ab_) ab_ = boundary_nodal(d_, [&](const Point3& x) { return a_.eval(x); });
  return *ab_;
}

const Vector& OperatorSet::a_domain() {
  if (!ad_) ad_ = domain_nodal(d_, [&](const Point3& x) { return a_.eval(x); });
  return *ad_;
}

const Matrix& OperatorSet::remainder_vertices() {
  return lazy(rv_, [&] { return assemble_remainder_R(d_, d_.vertex_points(), a_).m; });
}
const Matrix& OperatorSet::single_vertices() {
  return lazy(vv_, [&] { return assemble_single_layer_V(d_, d_.vertex_points(), a_).m; });
}
const Matrix& OperatorSet::double_vertices() {
  return lazy(wv_, [&] { return assemble_double_layer_W(d_, d_.vertex_points(), a_).m; });
}
const Matrix& OperatorSet::remainder_surface() {
  return lazy(rs_, [&] { return assemble_remainder_R(d_, d_.surface_points(), a_).m; });
}
const Matrix& OperatorSet::v_gal() {
  return lazy(vg_, [&] { return assemble_boundary_V(d_, a_).m; });
}
const Matrix& OperatorSet::w_gal() {
  return lazy(wg_, [&] { return assemble_boundary_W(d_, a_).m; });
}
const Matrix& OperatorSet::wp_gal() {
  return lazy(wpg_, [&] { return assemble_boundary_Wprime(d_, a_).m; });
}
const Matrix& OperatorSet::l_gal() {
  return lazy(lg_, [&] { return assemble_boundary_L(d_, a_).m; });
}
const Matrix& OperatorSet::v_gal_laplace() {
  return lazy(vgl_, [&] { return boundary_V_laplace(d_); });
}
const Matrix& OperatorSet::wp_gal_laplace() {
  return lazy(wpgl_, [&] { return boundary_Wprime_laplace(d_); });
}
const Matrix& OperatorSet::l_gal_weighted() {
  return lazy(lgw_, [&] { return Matrix(boundary_L_laplace(d_) * a_boundary().asDiagonal()); });
}
const Matrix& OperatorSet::mass_dna() {
  return lazy(mdna_, [&] { return d_.weighted_mass([&](const EvalPoint& p) { return normal_derivative(a_, p); }); });
}
const Matrix& OperatorSet::aux_conormal() {
  return lazy(aux_, [&] { return weak_conormal_aux(d_, a_, remainder_vertices(), lift_); });
}

const Matrix& OperatorSet::remainder_conormal() {
  return lazy(trem_, [&] {
    const auto nd = static_cast<Eigen::Index>(d_.n_dom());
    if (a_.is_constant()) return Matrix(Matrix::Zero(static_cast<Eigen::Index>(d_.n_bnd()), nd));
    // T R u = -d_nu P_Delta q - (1/2 + W'_Delta)(gamma u d_nu a) - d_nu a gamma R u
    const auto& pts = d_.surface_points();
    const Matrix b = Matrix(trace_matrix(d_));
    const Matrix nd_div = laplace_newton_normal_div(d_, pts, a_);
    const Matrix wp = boundary_Wprime_laplace(d_, [&](const EvalPoint& p) { return normal_derivative(a_, p); });
    Matrix m = -d_.galerkin_test(nd_div) - wp * b - 0.5 * mass_dna() * b;
    m -= d_.galerkin_test(remainder_surface(), [&](const EvalPoint& p) { return normal_derivative(a_, p); });
    return m;
  });
}

BlockOperator assemble_system(SystemKind kind, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  const SystemKind base = base_of(kind);
  BlockOperator op;
  op.kind = base;
  op.a11 = Matrix::Identity(nd, nd) + ops.remainder_vertices();
  const Matrix& m = d.mass();
  Matrix g21, g22;
  switch (base) {
    case SystemKind::D1:
      op.a12 = -ops.single_vertices();
      g21 = d.galerkin_test(ops.remainder_surface());
      g22 = -ops.v_gal();
      break;
    case SystemKind::D2Delta:
      op.a12 = -ops.single_vertices();
      g21 = ops.aux_conormal();
      g22 = 0.5 * m - ops.wp_gal_laplace();
      break;
    case SystemKind::D2:
      op.a12 = -ops.single_vertices();
      g21 = ops.remainder_conormal();
      g22 = 0.5 * m - ops.wp_gal();
      break;
    case SystemKind::N1Delta:
      op.a12 = ops.double_vertices();
      g21 = ops.aux_conormal();
      g22 = ops.l_gal_weighted();
      break;
    case SystemKind::N1:
      op.a12 = ops.double_vertices();
      g21 = ops.remainder_conormal();
      g22 = 0.5 * ops.mass_dna() + ops.l_gal();
      break;
    case SystemKind::N2:
      op.a12 = ops.double_vertices();
      g21 = d.galerkin_test(ops.remainder_surface());
      g22 = 0.5 * m + ops.w_gal();
      break;
    default: fail(ErrorKind::unsupported, "unsupported system kind");
  }
  op.a21 = d.mass_solve(g21);
  op.a22 = d.mass_solve(g22);
  require(op.a21.rows() == nb && op.a22.cols() == nb, ErrorKind::contract, "block dimensions are inconsistent");
  return is_stabilized(kind) ? perturb_neumann(op, ops) : op;
}

namespace {

struct SourceTerms {
  Vector p_vertices;  // P f~ at domain vertices
  Vector p_surface;   // P f~ at surface quadrature points
};

SourceTerms source_terms(OperatorSet& ops, const SourceData& src) {
  const Discretization& d = ops.disc();
  const Coefficient& a = ops.coefficient();
  SourceTerms t{Vector::Zero(static_cast<Eigen::Index>(d.n_dom())),
                Vector::Zero(static_cast<Eigen::Index>(d.surface_points().size()))};
  if (src.f) {
    t.p_vertices = newton_of_source(d, d.vertex_points(), src.f).cwiseQuotient(
        domain_nodal(d, [&](const Point3& x) { return a.eval(x); }));
    const Vector ns = newton_of_source(d, d.surface_points(), src.f);
    for (Eigen::Index q = 0; q < ns.size(); ++q) t.p_surface[q] = ns[q] / a.eval(d.surface_points()[q].x);
  }
  if (src.has_boundary_part()) {
    // P(gamma* mu) = -V mu
    t.p_vertices -= ops.single_vertices() * src.mu;
    t.p_surface -= assemble_single_layer_V(d, d.surface_points(), a).m * src.mu;
  }
  return t;
}

// T_Delta(f~; P_Delta f~) as a Galerkin functional.
Vector laplace_source_conormal(OperatorSet& ops, const SourceData& src) {
  const Discretization& d = ops.disc();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d.n_bnd()));
  if (src.f) {
    const auto& active = ops.lifting().active_tets();
    out += ops.lifting().matrix().transpose() *
           (source_moments(d, src.f) + flux_functional(d, newton_flux(d, src.f, nullptr, active)));
  }
  if (src.has_boundary_part()) out += 0.5 * d.mass() * src.mu - ops.wp_gal_laplace() * src.mu;
  return out;
}

// T(f~ + R* f~; P f~) as a Galerkin functional.
Vector source_conormal(OperatorSet& ops, const SourceData& src) {
  const Discretization& d = ops.disc();
  const Coefficient& a = ops.coefficient();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d.n_bnd()));
  if (src.f) {
    const auto& active = ops.lifting().active_tets();
    out += ops.lifting().matrix().transpose() *
           (source_moments(d, src.f) + remainder_star_moments(d, src.f, a, active) +
            flux_functional(d, newton_flux(d, src.f, &a, active)));
  }
  if (src.has_boundary_part()) out += 0.5 * d.mass() * src.mu - ops.wp_gal() * src.mu;
  return out;
}

void require_length(const Vector& v, std::size_t n, const char* what) {
  require(static_cast<std::size_t>(v.size()) == n, ErrorKind::contract,
          std::string(what) + " must have one value per boundary vertex");
}

}  // namespace

RhsAssembly assemble_rhs(SystemKind kind, OperatorSet& ops, const BoundaryData& data) {
  const Discretization& d = ops.disc();
  const Coefficient& a = ops.coefficient();
  const SystemKind base = base_of(kind);
  RhsAssembly rhs;
  rhs.kind = base;
  const SourceTerms src = source_terms(ops, data.source);
  const Matrix& m = d.mass();
  const Vector a_surface = [&] {
    Vector v(static_cast<Eigen::Index>(d.surface_points().size()));
    for (Eigen::Index q = 0; q < v.size(); ++q) v[q] = a.eval(d.surface_points()[q].x);
    return v;
  }();
  Vector g2;
  if (is_dirichlet(base)) {
    require_length(data.phi0, d.n_bnd(), "Dirichlet data");
    const Vector& phi0 = data.phi0;
    rhs.f1 = src.p_vertices - ops.double_vertices() * phi0;
    // gamma+ W phi0 = mean value - phi0 / 2 at the surface points
    const Vector w_mean = (d.double_layer_at_surface() * (ops.a_boundary().cwiseProduct(phi0))).cwiseQuotient(a_surface);
    rhs.f1_surface = src.p_surface - w_mean + 0.5 * d.surface_interp() * phi0;
    switch (base) {
      case SystemKind::D1: g2 = d.galerkin_test(src.p_surface) - ops.w_gal() * phi0 - 0.5 * m * phi0; break;
      case SystemKind::D2Delta: g2 = laplace_source_conormal(ops, data.source) - ops.l_gal_weighted() * phi0; break;
      default: g2 = source_conormal(ops, data.source) - (0.5 * ops.mass_dna() + ops.l_gal()) * phi0; break;
    }
  } else {
    require_length(data.psi0, d.n_bnd(), "Neumann data");
    const Vector& psi0 = data.psi0;
    rhs.f1 = src.p_vertices + ops.single_vertices() * psi0;
    rhs.f1_surface = src.p_surface + (d.single_layer_at_surface() * psi0).cwiseQuotient(a_surface);
    switch (base) {
      case SystemKind::N1Delta:
        g2 = laplace_source_conormal(ops, data.source) - 0.5 * m * psi0 + ops.wp_gal_laplace() * psi0;
        break;
      case SystemKind::N1: g2 = source_conormal(ops, data.source) - 0.5 * m * psi0 + ops.wp_gal() * psi0; break;
      default: g2 = d.galerkin_test(rhs.f1_surface); break;
    }
  }
  rhs.f2 = d.mass_solve(g2);
  return rhs;
}

Perturbation neumann_perturbation(SystemKind kind, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  const SystemKind base = base_of(kind);
  require(!is_dirichlet(base), ErrorKind::unsupported, "perturbation applies to Neumann systems only");
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  Perturbation p;
  p.functional = Vector::Zero(nd + nb);
  p.functional.tail(nb) = d.mass() * Vector::Ones(nb) / d.mesh().bnd.total_area();
  p.direction = Vector::Zero(nd + nb);
  if (base == SystemKind::N2) {
    const Coefficient& a = ops.coefficient();
    p.direction.head(nd) = ops.a_domain().cwiseInverse();
    p.direction.tail(nb) = d.mass_solve(d.galerkin_test(Vector(Vector::Ones(static_cast<Eigen::Index>(d.surface_points().size())))
                                                            , [&](const EvalPoint& e) { return 1.0 / a.eval(e.x); }));
  } else {
    p.direction.tail(nb).setOnes();
  }
  return p;
}

BlockOperator perturb_neumann(const BlockOperator& op, OperatorSet& ops) {
  require(!is_dirichlet(op.kind) && !is_stabilized(op.kind), ErrorKind::unsupported,
          std::string("cannot perturb system ") + to_string(op.kind));
  const Perturbation p = neumann_perturbation(op.kind, ops);
  const auto nd = op.n_dom();
  const auto nb = op.n_bnd();
  BlockOperator out = op;
  out.kind = stabilized(op.kind);
  // g0 only reads the boundary density, so only the second block column changes
  out.a12 += p.direction.head(nd) * p.functional.tail(nb).transpose();
  out.a22 += p.direction.tail(nb) * p.functional.tail(nb).transpose();
  return out;
}

double cokernel_g1Delta(const RhsAssembly& rhs, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  return Vector::Ones(static_cast<Eigen::Index>(d.n_bnd())).dot(d.mass() * rhs.f2);
}

double cokernel_g1(const RhsAssembly& rhs, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  require(static_cast<std::size_t>(rhs.f1_surface.size()) == d.surface_points().size(), ErrorKind::contract,
          "right-hand side lacks surface samples");
  double s = cokernel_g1Delta(rhs, ops);
  for (std::size_t q = 0; q < d.surface_points().size(); ++q) {
    const auto& p = d.surface_points()[q];
    s += p.weight * normal_derivative(ops.coefficient(), p) * rhs.f1_surface[static_cast<Eigen::Index>(q)];
  }
  return s;
}

CokernelWeights cokernel_g2_weights(OperatorSet& ops) {
  const Discretization& d = ops.disc();
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  const Vector rhs = d.mass() * Vector::Ones(nb);
  Eigen::LLT<Matrix> llt(ops.v_gal_laplace());
  require(llt.info() == Eigen::Success, ErrorKind::solver, "single layer Galerkin matrix is not positive definite");
  const Vector w = llt.solve(rhs);
  const Vector wpw = ops.wp_gal_laplace() * w;
  const Vector half = 0.5 * (d.mass() * w);
  return {d.mass_solve(Vector(half + wpw)), d.mass_solve(Vector(half - wpw))};
}

double cokernel_g2(const RhsAssembly& rhs, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  require(static_cast<std::size_t>(rhs.f1_surface.size()) == d.surface_points().size(), ErrorKind::contract,
          "right-hand side lacks surface samples");
  const CokernelWeights cw = cokernel_g2_weights(ops);
  // a is sampled at the quadrature points, not interpolated
  const Vector plus_q = d.surface_interp() * cw.plus;
  const Vector minus_q = d.surface_interp() * cw.minus;
  const Vector f2_q = d.surface_interp() * rhs.f2;
  double s = 0.0;
  for (std::size_t q = 0; q < d.surface_points().size(); ++q) {
    const auto i = static_cast<Eigen::Index>(q);
    const auto& p = d.surface_points()[q];
    s -= p.weight * ops.coefficient().eval(p.x) * (plus_q[i] * rhs.f1_surface[i] + minus_q[i] * f2_q[i]);
  }
  return s;
}

InverseAnsatz inverse_volume_ansatz(const Vector& g, OperatorSet& ops) {
  const Discretization& d = ops.disc();
  require(static_cast<std::size_t>(g.size()) == d.n_dom(), ErrorKind::contract, "ansatz needs a domain field");
  const Vector h = ops.a_domain().cwiseProduct(g);
  Eigen::LLT<Matrix> llt(ops.v_gal_laplace());
  require(llt.info() == Eigen::Success, ErrorKind::solver, "single layer Galerkin matrix is not positive definite");
  InverseAnsatz ans;
  ans.tau = llt.solve(Vector(d.mass() * trace_of(d, h)));
  ans.v = h - d.single_layer_at_vertices() * ans.tau;
  for (int v = 0; v < static_cast<int>(d.n_dom()); ++v)
    if (d.mesh().dom.boundary_node[v] >= 0) ans.v[v] = 0.0;
  return ans;
}

Vector volume_potential_of_ansatz(const InverseAnsatz& ans, OperatorSet& ops, const EvalPoints& y) {
  const Discretization& d = ops.disc();
  const auto& dom = d.mesh().dom;
  // unique tet faces as panels, with the face-mean of P_Delta(., y) per point
  std::map<std::array<int, 3>, std::size_t> slot;
  std::vector<TriGeom> faces;
  std::vector<std::array<std::size_t, 4>> tet_faces(dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k)
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key;
      for (int j = 0, m = 0; j < 4; ++j)
        if (j != i) key[m++] = dom.tets[k][j];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = slot.try_emplace(key, faces.size());
      if (fresh) {
        const std::array<Point3, 3> c{dom.vertices[key[0]], dom.vertices[key[1]], dom.vertices[key[2]]};
        faces.emplace_back(c, (c[1] - c[0]).cross(c[2] - c[0]).normalized());
      }
      tet_faces[k][i] = it->second;
    }
  std::vector<Point3> grad_v(dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    grad_v[k] = Point3::Zero();
    for (int j = 0; j < 4; ++j) grad_v[k] += ans.v[dom.tets[k][j]] * d.tet_gradients()[k][j];
  }
  const Vector vtau = laplace_single_layer(d, y) * ans.tau;
  Vector out(static_cast<Eigen::Index>(y.size()));
  parallel_for(y.size(), [&](std::size_t i) {
    std::vector<double> mean(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      double s = 0.0;
      integrate_tri(faces[f], y[i].x, d.options(),
                    [&](const Point3& x, double w, const std::array<double, 3>&) { s -= w / (kFourPi * (x - y[i].x).norm()); });
      mean[f] = s / faces[f].area;
    }
    double val = 0.0;
    for (std::size_t k = 0; k < dom.num_tets(); ++k) {
      // int_K grad_x P_Delta = sum over faces of outward normal * area * face mean
      Point3 c = Point3::Zero();
      for (int j = 0; j < 4; ++j) c -= 3.0 * dom.volumes[k] * mean[tet_faces[k][j]] * d.tet_gradients()[k][j];
      val -= grad_v[k].dot(c);
    }
    const auto ii = static_cast<Eigen::Index>(i);
    out[ii] = (val + vtau[ii]) / ops.coefficient().eval(y[i].x);
  });
  return out;
}

}  // namespace bdie
