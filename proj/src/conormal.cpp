#include "bdie/conormal.hpp"

#include "bdie/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <map>

namespace bdie {

namespace {

constexpr int kSourceDegree = 6;
constexpr int kVolumeDegree = 3;
constexpr int kFaceDegree = 4;

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Calls f(x, w, lam) with a regular tet rule on tet k.
template <class F>
void tet_rule(const Discretization& d, std::size_t k, int degree, F&& f) {
  const auto& q = gauss_rule_tet(degree);
  const auto& g = d.tets()[k];
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& l = q.points[i];
    const std::array<double, 4> lam{l[0], l[1], l[2], l[3]};
    f(lam[0] * g.v[0] + lam[1] * g.v[1] + lam[2] * g.v[2] + lam[3] * g.v[3], 6.0 * q.weights[i] * g.volume, lam);
  }
}

Point3 field_gradient(const Discretization& d, std::size_t k, const Vector& u) {
  const auto& tet = d.mesh().dom.tets[k];
  const auto& g = d.tet_gradients()[k];
  Point3 out = Point3::Zero();
  for (int j = 0; j < 4; ++j) out += u[tet[j]] * g[j];
  return out;
}

}  // namespace

LiftingKind lifting_from_id(const std::string& id) {
  if (id == "hat") return LiftingKind::hat;
  if (id == "harmonic") return LiftingKind::harmonic;
  fail(ErrorKind::usage, "unknown lifting '" + id + "' (expected hat or harmonic)");
}

const char* to_string(LiftingKind kind) noexcept { return kind == LiftingKind::hat ? "hat" : "harmonic"; }

Lifting::Lifting(const Discretization& d, LiftingKind kind) : kind_(kind) {
  const auto& dom = d.mesh().dom;
  const auto& bnd = d.mesh().bnd;
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  const auto nb = static_cast<Eigen::Index>(d.n_bnd());
  m_ = Matrix::Zero(nd, nb);
  for (Eigen::Index b = 0; b < nb; ++b) m_(bnd.domain_vertex[b], b) = 1.0;
  if (kind == LiftingKind::harmonic && !dom.interior_nodes.empty()) {
    const SparseMatrix k = stiffness(d);
    const auto ni = static_cast<Eigen::Index>(dom.interior_nodes.size());
    std::vector<int> slot(dom.num_vertices(), -1);
    for (Eigen::Index i = 0; i < ni; ++i) slot[dom.interior_nodes[i]] = static_cast<int>(i);
    Triplets tii;
    Matrix kib = Matrix::Zero(ni, nb);
    for (int col = 0; col < k.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
        const int r = slot[it.row()];
        if (r < 0) continue;
        if (slot[col] >= 0)
          tii.emplace_back(r, slot[col], it.value());
        else
          kib(r, dom.boundary_node[col]) += it.value();
      }
    Eigen::SimplicialLDLT<SparseMatrix> solver(from_triplets(ni, ni, tii));
    require(solver.info() == Eigen::Success, ErrorKind::solver, "interior stiffness factorization failed");
    const Matrix inner = solver.solve(Matrix(-kib));
    for (Eigen::Index i = 0; i < ni; ++i) m_.row(dom.interior_nodes[i]) = inner.row(i);
  }
  active_.assign(dom.num_tets(), kind == LiftingKind::harmonic);
  if (kind == LiftingKind::hat)
    for (std::size_t k = 0; k < dom.num_tets(); ++k)
      for (int v : dom.tets[k])
        if (dom.boundary_node[v] >= 0) active_[k] = true;
}

SparseMatrix stiffness(const Discretization& d) {
  const auto& dom = d.mesh().dom;
  Triplets t;
  t.reserve(16 * dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    const auto& g = d.tet_gradients()[k];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t.emplace_back(dom.tets[k][i], dom.tets[k][j], dom.volumes[k] * g[i].dot(g[j]));
  }
  const auto n = static_cast<Eigen::Index>(d.n_dom());
  return from_triplets(n, n, t);
}

SparseMatrix weighted_stiffness(const Discretization& d, const Coefficient& a) {
  const auto& dom = d.mesh().dom;
  Triplets t;
  t.reserve(16 * dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    double mean_a = 0.0;
    tet_rule(d, k, kSourceDegree, [&](const Point3& x, double w, const std::array<double, 4>&) { mean_a += w * a.eval(x); });
    const auto& g = d.tet_gradients()[k];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t.emplace_back(dom.tets[k][i], dom.tets[k][j], mean_a * g[i].dot(g[j]));
  }
  const auto n = static_cast<Eigen::Index>(d.n_dom());
  return from_triplets(n, n, t);
}

SparseMatrix gradient_coupling(const Discretization& d, const Coefficient& a) {
  const auto& dom = d.mesh().dom;
  Triplets t;
  t.reserve(16 * dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    // m_j = int_K lambda_j grad(a)
    std::array<Point3, 4> m{Point3::Zero(), Point3::Zero(), Point3::Zero(), Point3::Zero()};
    tet_rule(d, k, kSourceDegree, [&](const Point3& x, double w, const std::array<double, 4>& lam) {
      const Point3 ga = a.grad(x);
      for (int j = 0; j < 4; ++j) m[j] += w * lam[j] * ga;
    });
    const auto& g = d.tet_gradients()[k];
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col) t.emplace_back(dom.tets[k][row], dom.tets[k][col], m[col].dot(g[row]));
  }
  const auto n = static_cast<Eigen::Index>(d.n_dom());
  return from_triplets(n, n, t);
}

SparseMatrix domain_mass(const Discretization& d) {
  const auto& dom = d.mesh().dom;
  Triplets t;
  for (std::size_t k = 0; k < dom.num_tets(); ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t.emplace_back(dom.tets[k][i], dom.tets[k][j], dom.volumes[k] * (i == j ? 2.0 : 1.0) / 20.0);
  const auto n = static_cast<Eigen::Index>(d.n_dom());
  return from_triplets(n, n, t);
}

SparseMatrix trace_matrix(const Discretization& d) {
  Triplets t;
  for (std::size_t b = 0; b < d.n_bnd(); ++b) t.emplace_back(b, d.mesh().bnd.domain_vertex[b], 1.0);
  return from_triplets(static_cast<Eigen::Index>(d.n_bnd()), static_cast<Eigen::Index>(d.n_dom()), t);
}

Vector trace_of(const Discretization& d, const Vector& u) {
  require(static_cast<std::size_t>(u.size()) == d.n_dom(), ErrorKind::contract, "trace needs a domain field");
  Vector out(static_cast<Eigen::Index>(d.n_bnd()));
  for (std::size_t b = 0; b < d.n_bnd(); ++b) out[static_cast<Eigen::Index>(b)] = u[d.mesh().bnd.domain_vertex[b]];
  return out;
}

Vector source_moments(const Discretization& d, const ScalarField& g) {
  const auto& dom = d.mesh().dom;
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d.n_dom()));
  for (std::size_t k = 0; k < dom.num_tets(); ++k)
    tet_rule(d, k, kSourceDegree, [&](const Point3& x, double w, const std::array<double, 4>& lam) {
      const double gw = w * g(x);
      for (int j = 0; j < 4; ++j) out[dom.tets[k][j]] += gw * lam[j];
    });
  return out;
}

Vector source_functional(const Discretization& d, const SourceData& src) {
  Vector out = src.f ? source_moments(d, src.f) : Vector::Zero(static_cast<Eigen::Index>(d.n_dom()));
  if (src.has_boundary_part()) {
    require(static_cast<std::size_t>(src.mu.size()) == d.n_bnd(), ErrorKind::contract,
            "boundary source density has the wrong length");
    const Vector m = d.mass() * src.mu;
    for (std::size_t b = 0; b < d.n_bnd(); ++b) out[d.mesh().bnd.domain_vertex[b]] += m[static_cast<Eigen::Index>(b)];
  }
  return out;
}

Vector flux_functional(const Discretization& d, const FluxVectors& flux) {
  const auto& dom = d.mesh().dom;
  require(flux.size() == dom.num_tets(), ErrorKind::contract, "one flux vector per tet expected");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d.n_dom()));
  for (std::size_t k = 0; k < dom.num_tets(); ++k)
    for (int j = 0; j < 4; ++j) out[dom.tets[k][j]] += d.tet_gradients()[k][j].dot(flux[k]);
  return out;
}

FluxVectors flux_of_field(const Discretization& d, const Vector& u, const Coefficient& a) {
  require(static_cast<std::size_t>(u.size()) == d.n_dom(), ErrorKind::contract, "flux needs a domain field");
  FluxVectors out(d.mesh().dom.num_tets());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double int_a = 0.0;
    tet_rule(d, k, kSourceDegree, [&](const Point3& x, double w, const std::array<double, 4>&) { int_a += w * a.eval(x); });
    out[k] = int_a * field_gradient(d, k, u);
  }
  return out;
}

FluxVectors newton_flux(const Discretization& d, const ScalarField& f, const Coefficient* a,
                        const std::vector<bool>& active) {
  const auto& dom = d.mesh().dom;
  require(active.size() == dom.num_tets(), ErrorKind::contract, "active mask must cover every tet");
  const auto& fq = gauss_rule_triangle(kFaceDegree);
  // unique faces, sampled from their sorted vertex triple so neighbours share points
  std::map<std::array<int, 3>, std::size_t> face_slot;
  EvalPoints pts;
  std::vector<std::array<std::size_t, 4>> tet_faces(dom.num_tets());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    if (!active[k]) continue;
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key;
      for (int j = 0, m = 0; j < 4; ++j)
        if (j != i) key[m++] = dom.tets[k][j];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = face_slot.try_emplace(key, pts.size());
      if (fresh)
        for (std::size_t q = 0; q < fq.size(); ++q) {
          EvalPoint p;
          const auto& l = fq.points[q];
          p.x = l[0] * dom.vertices[key[0]] + l[1] * dom.vertices[key[1]] + l[2] * dom.vertices[key[2]];
          pts.push_back(p);
        }
      tet_faces[k][i] = it->second;
    }
  }
  std::vector<std::size_t> vol_slot(dom.num_tets(), 0);
  if (a)
    for (std::size_t k = 0; k < dom.num_tets(); ++k) {
      if (!active[k]) continue;
      vol_slot[k] = pts.size();
      tet_rule(d, k, kVolumeDegree, [&](const Point3& x, double, const std::array<double, 4>&) {
        EvalPoint p;
        p.x = x;
        pts.push_back(p);
      });
    }
  const Vector h = newton_of_source(d, pts, f);
  FluxVectors out(dom.num_tets(), Point3::Zero());
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    if (!active[k]) continue;
    const auto& g = d.tet_gradients()[k];
    for (int i = 0; i < 4; ++i) {
      double mean = 0.0;
      for (std::size_t q = 0; q < fq.size(); ++q) mean += 2.0 * fq.weights[q] * h[static_cast<Eigen::Index>(tet_faces[k][i] + q)];
      // outward normal times face area is -3 vol grad(lambda_i)
      out[k] -= 3.0 * dom.volumes[k] * mean * g[i];
    }
    if (a) {
      std::size_t q = vol_slot[k];
      tet_rule(d, k, kVolumeDegree, [&](const Point3& x, double w, const std::array<double, 4>&) {
        out[k] -= w * h[static_cast<Eigen::Index>(q++)] / a->eval(x) * a->grad(x);
      });
    }
  }
  return out;
}

Vector remainder_star_moments(const Discretization& d, const ScalarField& f, const Coefficient& a,
                              const std::vector<bool>& active) {
  const auto& dom = d.mesh().dom;
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d.n_dom()));
  if (a.is_constant()) return out;
  EvalPoints pts;
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    if (!active[k]) continue;
    tet_rule(d, k, kVolumeDegree, [&](const Point3& x, double, const std::array<double, 4>&) {
      EvalPoint p;
      p.x = x;
      pts.push_back(p);
    });
  }
  const Vector r = remainder_star_of_source(d, pts, a, f);
  Eigen::Index q = 0;
  for (std::size_t k = 0; k < dom.num_tets(); ++k) {
    if (!active[k]) continue;
    tet_rule(d, k, kVolumeDegree, [&](const Point3&, double w, const std::array<double, 4>& lam) {
      const double v = w * r[q++];
      for (int j = 0; j < 4; ++j) out[dom.tets[k][j]] += v * lam[j];
    });
  }
  return out;
}

Vector classical_conormal_dual(const Discretization& d, const Coefficient& a, const VectorField& grad_u) {
  const auto& pts = d.surface_points();
  Vector vals(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t q = 0; q < pts.size(); ++q)
    vals[static_cast<Eigen::Index>(q)] = a.eval(pts[q].x) * pts[q].normal.dot(grad_u(pts[q].x));
  return d.galerkin_test(vals);
}

Vector classical_conormal(const Discretization& d, const Coefficient& a, const VectorField& grad_u) {
  return d.mass_solve(classical_conormal_dual(d, a, grad_u));
}

Vector classical_conormal(const Discretization& d, const Coefficient& a, const Vector& u) {
  require(static_cast<std::size_t>(u.size()) == d.n_dom(), ErrorKind::contract, "conormal needs a domain field");
  const auto& pts = d.surface_points();
  Vector vals(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const auto k = static_cast<std::size_t>(d.mesh().bnd.triangle_tet[pts[q].tri]);
    vals[static_cast<Eigen::Index>(q)] = a.eval(pts[q].x) * pts[q].normal.dot(field_gradient(d, k, u));
  }
  return d.mass_solve(d.galerkin_test(vals));
}

Vector weak_conormal(const Discretization& d, const SourceData& src, const FluxVectors& flux, const Lifting& lift) {
  return lift.matrix().transpose() * (source_functional(d, src) + flux_functional(d, flux));
}

Vector weak_conormal(const Discretization& d, const SourceData& src, const Vector& u, const Coefficient& a,
                     const Lifting& lift) {
  return weak_conormal(d, src, flux_of_field(d, u, a), lift);
}

Matrix weak_conormal_aux(const Discretization& d, const Coefficient& a, const Matrix& remainder_at_vertices,
                         const Lifting& lift) {
  require(static_cast<std::size_t>(remainder_at_vertices.rows()) == d.n_dom() &&
              static_cast<std::size_t>(remainder_at_vertices.cols()) == d.n_dom(),
          ErrorKind::contract, "remainder must be collocated at the domain vertices");
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  if (a.is_constant()) return Matrix::Zero(static_cast<Eigen::Index>(d.n_bnd()), nd);
  const Vector an = domain_nodal(d, [&](const Point3& x) { return a.eval(x); });
  Matrix domain = Matrix(gradient_coupling(d, a));
  domain += stiffness(d) * (an.asDiagonal() * remainder_at_vertices);
  return lift.matrix().transpose() * domain;
}

Matrix conormal_aux_chain(const Discretization& d, const Coefficient& a) {
  const auto nd = static_cast<Eigen::Index>(d.n_dom());
  if (a.is_constant()) return Matrix::Zero(static_cast<Eigen::Index>(d.n_bnd()), nd);
  const auto& pts = d.surface_points();
  const Matrix b = Matrix(trace_matrix(d));
  const auto dna = [&](const EvalPoint& p) { return normal_derivative(a, p); };
  const Matrix nd_div = laplace_newton_normal_div(d, pts, a);
  return 0.5 * d.weighted_mass(dna) * b - d.galerkin_test(nd_div) - boundary_Wprime_laplace(d, dna) * b;
}

double dual_norm(const Discretization& d, const Vector& functional) {
  return std::sqrt(std::max(0.0, functional.dot(d.mass_solve(functional))));
}

Vector third_green_residual(const Discretization& d, const Coefficient& a, const EvalPoints& y, const Vector& u_at_y,
                            const Vector& u, const Vector& psi, const Vector& phi, const SourceData& src) {
  for (const auto& p : y)
    require(p.site == EvalPoint::Site::interior, ErrorKind::contract, "third Green residual needs interior points");
  require(static_cast<std::size_t>(u_at_y.size()) == y.size(), ErrorKind::contract, "one field value per point");
  const Matrix v = assemble_single_layer_V(d, y, a).m;
  Vector r = u_at_y + assemble_remainder_R(d, y, a).m * u - v * psi + assemble_double_layer_W(d, y, a).m * phi;
  if (src.f) {
    const Vector pf = newton_of_source(d, y, src.f);
    for (std::size_t i = 0; i < y.size(); ++i) r[static_cast<Eigen::Index>(i)] -= pf[static_cast<Eigen::Index>(i)] / a.eval(y[i].x);
  }
  if (src.has_boundary_part()) r += v * src.mu;
  return r;
}

double first_green_residual(const Discretization& d, const Coefficient& a, const Vector& u, const SourceData& src,
                            const Vector& conormal_dual, const Vector& v) {
  return conormal_dual.dot(trace_of(d, v)) - source_functional(d, src).dot(v) -
         u.dot(weighted_stiffness(d, a) * v);
}

double second_green_residual(const Discretization& d, const Vector& u, const SourceData& src_u,
                             const Vector& conormal_u, const Vector& v, const SourceData& src_v,
                             const Vector& conormal_v) {
  return conormal_u.dot(trace_of(d, v)) - conormal_v.dot(trace_of(d, u)) - source_functional(d, src_u).dot(v) +
         source_functional(d, src_v).dot(u);
}

}  // namespace bdie
