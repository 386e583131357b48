#include "bdie/potentials.hpp"

#include "bdie/error.hpp"
#include "bdie/kernels.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace bdie {

namespace {

constexpr double kInvFourPi = 1.0 / kFourPi;

bool panel_touches(const BoundaryMesh& bnd, std::size_t t, const EvalPoint& y) {
  if (y.site == EvalPoint::Site::boundary_face) return static_cast<int>(t) == y.tri;
  if (y.site == EvalPoint::Site::boundary_vertex) {
    const auto& tr = bnd.triangles[t];
    return tr[0] == y.bvertex || tr[1] == y.bvertex || tr[2] == y.bvertex;
  }
  return false;
}

// contrib(y, x, w, lam, tet, acc[4]) accumulates per-hat integrals on one tetrahedron.
template <class Contrib>
Matrix volume_loop(const Discretization& d, const EvalPoints& y, Contrib contrib) {
  const auto& dom = d.mesh().dom;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(d.n_dom()));
  parallel_for(y.size(), [&](std::size_t i) {
    const EvalPoint& yi = y[i];
    for (std::size_t k = 0; k < dom.num_tets(); ++k) {
      std::array<double, 4> acc{};
      integrate_tet(d.tets()[k], yi.x, d.options(),
                    [&](const Point3& x, double w, const std::array<double, 4>& lam) { contrib(yi, x, w, lam, k, acc); });
      for (int v = 0; v < 4; ++v) out(static_cast<Eigen::Index>(i), dom.tets[k][v]) += acc[v];
    }
  });
  return out;
}

template <class Integrand>
Vector volume_source_loop(const Discretization& d, const EvalPoints& y, Integrand integrand) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(y.size()));
  parallel_for(y.size(), [&](std::size_t i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d.mesh().dom.num_tets(); ++k)
      integrate_tet(d.tets()[k], y[i].x, d.options(),
                    [&](const Point3& x, double w, const std::array<double, 4>&) { sum += w * integrand(y[i], x); });
    out[static_cast<Eigen::Index>(i)] = sum;
  });
  return out;
}

// contrib(y, x, w, lam, tri, acc[3]); panels containing a boundary site are skipped when skip_own.
template <class Contrib>
Matrix surface_loop(const Discretization& d, const EvalPoints& y, bool skip_own, Contrib contrib) {
  const auto& bnd = d.mesh().bnd;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(d.n_bnd()));
  parallel_for(y.size(), [&](std::size_t i) {
    const EvalPoint& yi = y[i];
    for (std::size_t t = 0; t < bnd.num_triangles(); ++t) {
      if (skip_own && panel_touches(bnd, t, yi)) continue;
      std::array<double, 3> acc{};
      integrate_tri(d.tris()[t], yi.x, d.options(),
                    [&](const Point3& x, double w, const std::array<double, 3>& lam) { contrib(yi, x, w, lam, t, acc); });
      for (int v = 0; v < 3; ++v) out(static_cast<Eigen::Index>(i), bnd.triangles[t][v]) += acc[v];
    }
  });
  return out;
}

}  // namespace

const char* to_string(OpTag tag) noexcept {
  switch (tag) {
    case OpTag::P: return "P";
    case OpTag::R: return "R";
    case OpTag::Rstar: return "Rstar";
    case OpTag::V: return "V";
    case OpTag::W: return "W";
    case OpTag::Vb: return "Vb";
    case OpTag::Wb: return "Wb";
    case OpTag::Wpb: return "Wpb";
    case OpTag::Lb: return "Lb";
    case OpTag::Other: return "other";
  }
  return "other";
}

EvalPoints domain_vertex_points(const MeshPair& mesh) {
  EvalPoints pts(mesh.dom.num_vertices());
  for (std::size_t v = 0; v < pts.size(); ++v) {
    pts[v].x = mesh.dom.vertices[v];
    const int b = mesh.dom.boundary_node[v];
    if (b >= 0) {
      pts[v].site = EvalPoint::Site::boundary_vertex;
      pts[v].bvertex = b;
    }
  }
  return pts;
}

EvalPoints boundary_quadrature_points(const MeshPair& mesh, int degree) {
  const auto& q = gauss_rule_triangle(degree);
  const auto& bnd = mesh.bnd;
  EvalPoints pts;
  pts.reserve(bnd.num_triangles() * q.size());
  for (std::size_t t = 0; t < bnd.num_triangles(); ++t) {
    const auto c = bnd.corners(t);
    for (std::size_t i = 0; i < q.size(); ++i) {
      EvalPoint p;
      p.bary = {q.points[i][0], q.points[i][1], q.points[i][2]};
      p.x = p.bary[0] * c[0] + p.bary[1] * c[1] + p.bary[2] * c[2];
      p.site = EvalPoint::Site::boundary_face;
      p.tri = static_cast<int>(t);
      p.normal = bnd.normals[t];
      p.weight = 2.0 * q.weights[i] * bnd.areas[t];
      pts.push_back(p);
    }
  }
  return pts;
}

EvalPoints free_points(std::span<const Point3> pts) {
  EvalPoints out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i].x = pts[i];
  return out;
}

Discretization::Discretization(const MeshPair& mesh, QuadOptions opt)
    : mesh_(mesh), opt_(opt), tets_(tet_geometry(mesh.dom)), tris_(tri_geometry(mesh.bnd)) {
  grads_.reserve(mesh.dom.num_tets());
  for (std::size_t k = 0; k < mesh.dom.num_tets(); ++k) grads_.push_back(mesh.dom.basis_gradients(k));
  vertex_points_ = domain_vertex_points(mesh);
  surface_points_ = boundary_quadrature_points(mesh, opt.tri_degree);
  const auto nb = static_cast<Eigen::Index>(mesh.bnd.num_vertices());
  mass_ = Matrix::Zero(nb, nb);
  for (std::size_t t = 0; t < mesh.bnd.num_triangles(); ++t) {
    const auto& tr = mesh.bnd.triangles[t];
    const double a12 = mesh.bnd.areas[t] / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mass_(tr[i], tr[j]) += (i == j ? 2.0 : 1.0) * a12;
  }
  mass_llt_.compute(mass_);
  require(mass_llt_.info() == Eigen::Success, ErrorKind::validation, "boundary mass matrix is not positive definite");
}

Vector Discretization::mass_solve(const Vector& rhs) const { return mass_llt_.solve(rhs); }
Matrix Discretization::mass_solve(const Matrix& rhs) const { return mass_llt_.solve(rhs); }

Matrix Discretization::galerkin_test(const Matrix& e, const std::function<double(const EvalPoint&)>& rho) const {
  require(static_cast<std::size_t>(e.rows()) == surface_points_.size(), ErrorKind::contract,
          "Galerkin test needs one row per surface quadrature point");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n_bnd()), e.cols());
  for (std::size_t q = 0; q < surface_points_.size(); ++q) {
    const auto& p = surface_points_[q];
    const double w = p.weight * (rho ? rho(p) : 1.0);
    const auto& tr = mesh_.bnd.triangles[p.tri];
    for (int j = 0; j < 3; ++j) out.row(tr[j]) += (w * p.bary[j]) * e.row(static_cast<Eigen::Index>(q));
  }
  return out;
}

Vector Discretization::galerkin_test(const Vector& e, const std::function<double(const EvalPoint&)>& rho) const {
  require(static_cast<std::size_t>(e.size()) == surface_points_.size(), ErrorKind::contract,
          "Galerkin test needs one value per surface quadrature point");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n_bnd()));
  for (std::size_t q = 0; q < surface_points_.size(); ++q) {
    const auto& p = surface_points_[q];
    const double w = p.weight * (rho ? rho(p) : 1.0);
    const auto& tr = mesh_.bnd.triangles[p.tri];
    for (int j = 0; j < 3; ++j) out[tr[j]] += w * p.bary[j] * e[static_cast<Eigen::Index>(q)];
  }
  return out;
}

Matrix Discretization::weighted_mass(const std::function<double(const EvalPoint&)>& rho) const {
  return galerkin_test(surface_interp(), rho);
}

const Matrix& Discretization::surface_trace() const {
  std::lock_guard lock(mtx_);
  if (!trace_) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(surface_points_.size()), static_cast<Eigen::Index>(n_dom()));
    for (std::size_t q = 0; q < surface_points_.size(); ++q) {
      const auto& p = surface_points_[q];
      for (int j = 0; j < 3; ++j)
        m(static_cast<Eigen::Index>(q), mesh_.bnd.domain_vertex[mesh_.bnd.triangles[p.tri][j]]) += p.bary[j];
    }
    trace_ = std::move(m);
  }
  return *trace_;
}

const Matrix& Discretization::surface_interp() const {
  std::lock_guard lock(mtx_);
  if (!interp_) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(surface_points_.size()), static_cast<Eigen::Index>(n_bnd()));
    for (std::size_t q = 0; q < surface_points_.size(); ++q) {
      const auto& p = surface_points_[q];
      for (int j = 0; j < 3; ++j) m(static_cast<Eigen::Index>(q), mesh_.bnd.triangles[p.tri][j]) += p.bary[j];
    }
    interp_ = std::move(m);
  }
  return *interp_;
}

namespace {

template <class Build>
const Matrix& cached(std::mutex& mtx, std::optional<Matrix>& slot, Build build) {
  {
    std::lock_guard lock(mtx);
    if (slot) return *slot;
  }
  Matrix m = build();
  std::lock_guard lock(mtx);
  if (!slot) slot = std::move(m);
  return *slot;
}

}  // namespace

const Matrix& Discretization::single_layer_at_surface() const {
  return cached(mtx_, vs_, [this] { return laplace_single_layer(*this, surface_points_); });
}
const Matrix& Discretization::double_layer_at_surface() const {
  return cached(mtx_, ws_, [this] { return laplace_double_layer(*this, surface_points_); });
}
const Matrix& Discretization::adjoint_double_at_surface() const {
  return cached(mtx_, wps_, [this] { return laplace_adjoint_double_layer(*this, surface_points_); });
}
const Matrix& Discretization::newton_at_surface() const {
  return cached(mtx_, ns_, [this] { return laplace_newton(*this, surface_points_); });
}
const Matrix& Discretization::single_layer_at_vertices() const {
  return cached(mtx_, vv_, [this] { return laplace_single_layer(*this, vertex_points_); });
}
const Matrix& Discretization::double_layer_at_vertices() const {
  return cached(mtx_, wv_, [this] { return laplace_double_layer(*this, vertex_points_); });
}
const Matrix& Discretization::newton_at_vertices() const {
  return cached(mtx_, nv_, [this] { return laplace_newton(*this, vertex_points_); });
}

const Matrix& Discretization::panel_pair_single() const {
  return cached(mtx_, pps_, [this] {
    const auto nt = mesh_.bnd.num_triangles();
    const auto nq = surface_points_.size();
    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(nt));
    parallel_for(nq, [&](std::size_t q) {
      const Point3& y = surface_points_[q].x;
      for (std::size_t t = 0; t < nt; ++t) {
        double sum = 0.0;
        integrate_tri(tris_[t], y, opt_,
                      [&](const Point3& x, double w, const std::array<double, 3>&) { sum += w / (x - y).norm(); });
        e(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(t)) = kInvFourPi * sum;
      }
    });
    Matrix pairs = Matrix::Zero(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nt));
    for (std::size_t q = 0; q < nq; ++q) {
      const auto& p = surface_points_[q];
      pairs.row(p.tri) += p.weight * e.row(static_cast<Eigen::Index>(q));
    }
    return Matrix(0.5 * (pairs + pairs.transpose()));
  });
}

Matrix laplace_single_layer(const Discretization& d, const EvalPoints& y, const PanelWeight& weight) {
  return surface_loop(d, y, false,
                      [&](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 3>& lam,
                          std::size_t t, std::array<double, 3>& acc) {
                        double k = w * kInvFourPi / (x - yi.x).norm();
                        if (weight) k *= weight(x, t);
                        for (int j = 0; j < 3; ++j) acc[j] += k * lam[j];
                      });
}

Matrix laplace_double_layer(const Discretization& d, const EvalPoints& y) {
  const auto& normals = d.mesh().bnd.normals;
  Matrix out = surface_loop(d, y, true,
                            [&](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 3>& lam,
                                std::size_t t, std::array<double, 3>& acc) {
                              const Point3 r = x - yi.x;
                              const double rn = r.norm();
                              const double k = -w * kInvFourPi * normals[t].dot(r) / (rn * rn * rn);
                              for (int j = 0; j < 3; ++j) acc[j] += k * lam[j];
                            });
  // singularity subtraction fixes the limit: W1 = -1 inside, 0 outside
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double s = out.row(row).sum();
    if (y[i].site == EvalPoint::Site::boundary_vertex) {
      out(row, y[i].bvertex) -= s + 1.0;
    } else if (y[i].site == EvalPoint::Site::boundary_face) {
      const auto& tr = d.mesh().bnd.triangles[y[i].tri];
      for (int j = 0; j < 3; ++j) out(row, tr[j]) -= y[i].bary[j] * (s + 0.5);
    }
  }
  return out;
}

Matrix laplace_adjoint_double_layer(const Discretization& d, const EvalPoints& y, const PanelWeight& weight) {
  for (const auto& p : y)
    require(p.normal.squaredNorm() > 0.5, ErrorKind::contract, "adjoint double layer needs a normal at each point");
  return surface_loop(d, y, true,
                      [&](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 3>& lam,
                          std::size_t t, std::array<double, 3>& acc) {
                        const Point3 r = x - yi.x;
                        const double rn = r.norm();
                        double k = w * kInvFourPi * yi.normal.dot(r) / (rn * rn * rn);
                        if (weight) k *= weight(x, t);
                        for (int j = 0; j < 3; ++j) acc[j] += k * lam[j];
                      });
}

Matrix laplace_newton(const Discretization& d, const EvalPoints& y) {
  return volume_loop(d, y,
                     [](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 4>& lam, std::size_t,
                        std::array<double, 4>& acc) {
                       const double k = -w * kInvFourPi / (x - yi.x).norm();
                       for (int j = 0; j < 4; ++j) acc[j] += k * lam[j];
                     });
}

namespace {

template <class Kernel>
Matrix divergence_basis_loop(const Discretization& d, const EvalPoints& y, const Coefficient& a, Kernel kernel) {
  const auto& grads = d.tet_gradients();
  return volume_loop(d, y,
                     [&](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 4>& lam,
                         std::size_t k, std::array<double, 4>& acc) {
                       const double kv = w * kernel(yi, x);
                       const Point3 ga = a.grad(x);
                       const double la = a.laplacian(x);
                       for (int j = 0; j < 4; ++j) acc[j] += kv * (grads[k][j].dot(ga) + lam[j] * la);
                     });
}

}  // namespace

Matrix laplace_newton_normal_div(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  for (const auto& p : y)
    require(p.normal.squaredNorm() > 0.5, ErrorKind::contract, "normal derivative needs a normal at each point");
  return divergence_basis_loop(d, y, a, [](const EvalPoint& yi, const Point3& x) {
    const Point3 r = x - yi.x;
    const double rn = r.norm();
    return -kInvFourPi * yi.normal.dot(r) / (rn * rn * rn);
  });
}

Matrix laplace_newton_div(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  return divergence_basis_loop(d, y, a,
                               [](const EvalPoint& yi, const Point3& x) { return -kInvFourPi / (x - yi.x).norm(); });
}

Vector newton_of_source(const Discretization& d, const EvalPoints& y, const ScalarField& f) {
  return volume_source_loop(d, y, [&](const EvalPoint& yi, const Point3& x) {
    return -kInvFourPi * f(x) / (x - yi.x).norm();
  });
}

Vector newton_normal_of_source(const Discretization& d, const EvalPoints& y, const ScalarField& f) {
  for (const auto& p : y)
    require(p.normal.squaredNorm() > 0.5, ErrorKind::contract, "normal derivative needs a normal at each point");
  return volume_source_loop(d, y, [&](const EvalPoint& yi, const Point3& x) {
    const Point3 r = x - yi.x;
    const double rn = r.norm();
    return -kInvFourPi * yi.normal.dot(r) / (rn * rn * rn) * f(x);
  });
}

Vector remainder_star_of_source(const Discretization& d, const EvalPoints& y, const Coefficient& a,
                                const ScalarField& f) {
  return volume_source_loop(d, y,
                            [&](const EvalPoint& yi, const Point3& x) { return remainder_Rstar(x, yi.x, a) * f(x); });
}

Vector remainder_of_source(const Discretization& d, const EvalPoints& y, const Coefficient& a, const ScalarField& f) {
  return volume_source_loop(d, y,
                            [&](const EvalPoint& yi, const Point3& x) { return remainder_R(x, yi.x, a) * f(x); });
}

ValueGrad single_layer_point(const Discretization& d, const Point3& y, const ScalarField& density) {
  ValueGrad out;
  for (const auto& g : d.tris())
    integrate_tri(g, y, d.options(), [&](const Point3& x, double w, const std::array<double, 3>&) {
      const Point3 r = x - y;
      const double rn = r.norm();
      const double s = w * kInvFourPi * density(x);
      out.value += s / rn;
      out.grad += s * r / (rn * rn * rn);
    });
  return out;
}

ValueGrad double_layer_point(const Discretization& d, const Point3& y, const ScalarField& density) {
  ValueGrad out;
  for (const auto& g : d.tris())
    integrate_tri(g, y, d.options(), [&](const Point3& x, double w, const std::array<double, 3>&) {
      const Point3 r = x - y;
      const double rn = r.norm();
      const double r3 = rn * rn * rn;
      const double nr = g.normal.dot(r);
      const double s = w * kInvFourPi * density(x);
      out.value -= s * nr / r3;
      out.grad += s * (g.normal / r3 - 3.0 * nr * r / (r3 * rn * rn));
    });
  return out;
}

namespace {

Vector inverse_a_at(const EvalPoints& y, const Coefficient& a) {
  Vector v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = 1.0 / a.eval(y[i].x);
  return v;
}

}  // namespace

Vector boundary_nodal(const Discretization& d, const ScalarField& f) {
  Vector v(static_cast<Eigen::Index>(d.n_bnd()));
  for (std::size_t i = 0; i < d.n_bnd(); ++i) v[static_cast<Eigen::Index>(i)] = f(d.mesh().bnd.vertices[i]);
  return v;
}

Vector domain_nodal(const Discretization& d, const ScalarField& f) {
  Vector v(static_cast<Eigen::Index>(d.n_dom()));
  for (std::size_t i = 0; i < d.n_dom(); ++i) v[static_cast<Eigen::Index>(i)] = f(d.mesh().dom.vertices[i]);
  return v;
}

double normal_derivative(const Coefficient& a, const EvalPoint& y) { return a.grad(y.x).dot(y.normal); }

PotentialMatrix assemble_volume_P(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  const Matrix& lap = (&y == &d.vertex_points())    ? d.newton_at_vertices()
                      : (&y == &d.surface_points()) ? d.newton_at_surface()
                                                    : laplace_newton(d, y);
  return {OpTag::P, inverse_a_at(y, a).asDiagonal() * lap};
}

PotentialMatrix assemble_remainder_R(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  if (a.is_constant()) return {OpTag::R, Matrix::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(d.n_dom()))};
  return {OpTag::R, volume_loop(d, y,
                                [&](const EvalPoint& yi, const Point3& x, double w, const std::array<double, 4>& lam,
                                    std::size_t, std::array<double, 4>& acc) {
                                  const double k = w * remainder_R(x, yi.x, a);
                                  for (int j = 0; j < 4; ++j) acc[j] += k * lam[j];
                                })};
}

PotentialMatrix assemble_remainder_Rstar(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  if (a.is_constant())
    return {OpTag::Rstar, Matrix::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(d.n_dom()))};
  return {OpTag::Rstar, volume_loop(d, y,
                                    [&](const EvalPoint& yi, const Point3& x, double w,
                                        const std::array<double, 4>& lam, std::size_t, std::array<double, 4>& acc) {
                                      const double k = w * remainder_Rstar(x, yi.x, a);
                                      for (int j = 0; j < 4; ++j) acc[j] += k * lam[j];
                                    })};
}

PotentialMatrix assemble_single_layer_V(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  const Matrix& lap = (&y == &d.vertex_points())    ? d.single_layer_at_vertices()
                      : (&y == &d.surface_points()) ? d.single_layer_at_surface()
                                                    : laplace_single_layer(d, y);
  return {OpTag::V, inverse_a_at(y, a).asDiagonal() * lap};
}

PotentialMatrix assemble_double_layer_W(const Discretization& d, const EvalPoints& y, const Coefficient& a) {
  const Matrix& lap = (&y == &d.vertex_points())    ? d.double_layer_at_vertices()
                      : (&y == &d.surface_points()) ? d.double_layer_at_surface()
                                                    : laplace_double_layer(d, y);
  const Vector an = boundary_nodal(d, [&](const Point3& x) { return a.eval(x); });
  return {OpTag::W, inverse_a_at(y, a).asDiagonal() * lap * an.asDiagonal()};
}

Matrix boundary_V_laplace(const Discretization& d) {
  const Matrix g = d.galerkin_test(d.single_layer_at_surface());
  return 0.5 * (g + g.transpose());
}

Matrix boundary_W_laplace(const Discretization& d) { return d.galerkin_test(d.double_layer_at_surface()); }

// Galerkin form of W'_Delta as the transpose of the tested W_Delta; the inner
// integral then carries the singularity subtraction.
Matrix boundary_Wprime_laplace(const Discretization& d, const std::function<double(const EvalPoint&)>& rho) {
  return d.galerkin_test(d.double_layer_at_surface(), rho).transpose();
}

Matrix boundary_L_laplace(const Discretization& d) {
  const auto& bnd = d.mesh().bnd;
  const auto nt = static_cast<Eigen::Index>(bnd.num_triangles());
  const auto nb = static_cast<Eigen::Index>(bnd.num_vertices());
  // surface curls of the hats: curl lambda_i = -(v_{i+2} - v_{i+1}) / (2 area)
  std::array<Matrix, 3> c{Matrix::Zero(nb, nt), Matrix::Zero(nb, nt), Matrix::Zero(nb, nt)};
  for (Eigen::Index t = 0; t < nt; ++t) {
    const auto& tr = bnd.triangles[t];
    const auto x = bnd.corners(t);
    for (int i = 0; i < 3; ++i) {
      const Point3 curl = -(x[(i + 2) % 3] - x[(i + 1) % 3]) / (2.0 * bnd.areas[t]);
      for (int k = 0; k < 3; ++k) c[k](tr[i], t) += curl[k];
    }
  }
  const Matrix& pairs = d.panel_pair_single();
  Matrix l = Matrix::Zero(nb, nb);
  for (int k = 0; k < 3; ++k) l.noalias() -= c[k] * pairs * c[k].transpose();
  return l;
}

PotentialMatrix assemble_boundary_V(const Discretization& d, const Coefficient& a) {
  return {OpTag::Vb, d.galerkin_test(d.single_layer_at_surface(),
                                     [&](const EvalPoint& p) { return 1.0 / a.eval(p.x); })};
}

PotentialMatrix assemble_boundary_W(const Discretization& d, const Coefficient& a) {
  const Vector an = boundary_nodal(d, [&](const Point3& x) { return a.eval(x); });
  return {OpTag::Wb, d.galerkin_test(d.double_layer_at_surface(), [&](const EvalPoint& p) {
                       return 1.0 / a.eval(p.x);
                     }) * an.asDiagonal()};
}

PotentialMatrix assemble_boundary_Wprime(const Discretization& d, const Coefficient& a) {
  Matrix m = boundary_Wprime_laplace(d);
  if (!a.is_constant())
    m -= d.galerkin_test(d.single_layer_at_surface(),
                         [&](const EvalPoint& p) { return normal_derivative(a, p) / a.eval(p.x); });
  return {OpTag::Wpb, m};
}

PotentialMatrix assemble_boundary_L(const Discretization& d, const Coefficient& a) {
  const Vector an = boundary_nodal(d, [&](const Point3& x) { return a.eval(x); });
  Matrix m = boundary_L_laplace(d) * an.asDiagonal();
  if (!a.is_constant())
    m -= d.galerkin_test(d.double_layer_at_surface(),
                         [&](const EvalPoint& p) { return normal_derivative(a, p) / a.eval(p.x); }) *
         an.asDiagonal();
  return {OpTag::Lb, m};
}

OneSided trace_of_single_layer(const Discretization& d, const Coefficient& a, const Vector& psi) {
  const Vector v = assemble_boundary_V(d, a).m * psi;
  return {v, v};
}

OneSided trace_of_double_layer(const Discretization& d, const Coefficient& a, const Vector& phi) {
  const Vector w = assemble_boundary_W(d, a).m * phi;
  const Vector half = 0.5 * (d.mass() * phi);
  return {w - half, w + half};
}

OneSided conormal_of_single_layer(const Discretization& d, const Coefficient& a, const Vector& psi) {
  const Vector w = assemble_boundary_Wprime(d, a).m * psi;
  const Vector half = 0.5 * (d.mass() * psi);
  return {w + half, w - half};
}

OneSided conormal_of_double_layer(const Discretization& d, const Coefficient& a, const Vector& phi) {
  const Vector l = assemble_boundary_L(d, a).m * phi;
  const Vector half = 0.5 * (d.weighted_mass([&](const EvalPoint& p) { return normal_derivative(a, p); }) * phi);
  return {l + half, l - half};
}

namespace {
constexpr char kMatrixMagic[8] = {'B', 'D', 'I', 'E', 'M', 'A', 'T', '1'};
}

void save_matrix(const std::string& path, const PotentialMatrix& pm) {
  static_assert(std::endian::native == std::endian::little, "matrix dump assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::resource, "cannot open '" + path + "' for writing");
  const std::int32_t tag = static_cast<std::int32_t>(pm.tag);
  const std::uint64_t rows = static_cast<std::uint64_t>(pm.m.rows()), cols = static_cast<std::uint64_t>(pm.m.cols());
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  out.write(reinterpret_cast<const char*>(&tag), sizeof tag);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = pm.m;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  require(static_cast<bool>(out), ErrorKind::resource, "write to '" + path + "' failed");
}

PotentialMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::resource, "cannot open '" + path + "'");
  char magic[8];
  std::int32_t tag = 0;
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&tag), sizeof tag);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  require(in && std::memcmp(magic, kMatrixMagic, sizeof magic) == 0, ErrorKind::parse, "bad matrix header in '" + path + "'");
  require(tag >= 0 && tag <= static_cast<std::int32_t>(OpTag::Other), ErrorKind::parse, "unknown operator tag");
  require(rows < (1ull << 24) && cols < (1ull << 24), ErrorKind::parse, "implausible matrix dimensions");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(static_cast<Eigen::Index>(rows),
                                                                           static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  require(static_cast<bool>(in), ErrorKind::parse, "truncated matrix data in '" + path + "'");
  return {static_cast<OpTag>(tag), Matrix(rm)};
}

}  // namespace bdie
