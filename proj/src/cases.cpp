#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <algorithm>
#include <cmath>

namespace bdie {

double ManufacturedCase::psi0(const Point3& x, const Point3& normal) const {
  return a.eval(x) * normal.dot(grad_u(x));
}

SourceData ManufacturedCase::source() const { return source_free ? SourceData::zero() : SourceData::of(f); }

BoundaryData ManufacturedCase::data(const Discretization& d) const {
  BoundaryData out;
  out.source = source();
  out.phi0 = boundary_nodal(d, u_exact);
  out.psi0 = classical_conormal(d, a, grad_u);
  return out;
}

std::vector<ManufacturedCase> builtin_cases() {
  std::vector<ManufacturedCase> cases;
  {
    const Point3 x0(2.0, 2.0, 2.0);
    ManufacturedCase c{"M0", Coefficient::constant(1.0), {}, {}, {}, true};
    c.u_exact = [x0](const Point3& x) { return 1.0 / (x - x0).norm(); };
    c.grad_u = [x0](const Point3& x) -> Point3 {
      const Point3 r = x - x0;
      return -r / std::pow(r.norm(), 3);
    };
    c.f = [](const Point3&) { return 0.0; };
    cases.push_back(std::move(c));
  }
  {
    ManufacturedCase c{"M1", Coefficient::affine(2.0, 1.0), {}, {}, {}, false};
    c.u_exact = [](const Point3& x) { return x[0] + x[1] * x[1]; };
    c.grad_u = [](const Point3& x) -> Point3 { return {1.0, 2.0 * x[1], 0.0}; };
    c.f = [](const Point3& x) { return 5.0 + 2.0 * x[0]; };
    cases.push_back(std::move(c));
  }
  {
    ManufacturedCase c{"M2", Coefficient::exponential(1.0), {}, {}, {}, false};
    c.u_exact = [](const Point3& x) { return x[0] * x[2]; };
    c.grad_u = [](const Point3& x) -> Point3 { return {x[2], 0.0, x[0]}; };
    c.f = [](const Point3& x) { return std::exp(x[0]) * x[2]; };
    cases.push_back(std::move(c));
  }
  return cases;
}

ManufacturedCase find_case(const std::string& id) {
  for (auto& c : builtin_cases())
    if (c.id == id) return c;
  fail(ErrorKind::usage, "unknown case '" + id + "'");
}

MeshPair build_mesh(const std::string& shape, int level) {
  if (shape == "cube") return build_cube_mesh(level);
  if (shape == "ball") return build_ball_mesh(level);
  fail(ErrorKind::usage, "unknown shape '" + shape + "'");
}

std::vector<Point3> interior_probes(const std::string& shape) {
  if (shape == "cube")
    return {{0.5, 0.5, 0.5}, {0.3, 0.6, 0.45}, {0.7, 0.35, 0.55}, {0.4, 0.4, 0.7}};
  if (shape == "ball")
    return {{0.0, 0.0, 0.0}, {0.3, -0.2, 0.1}, {-0.4, 0.3, 0.2}, {0.1, 0.5, -0.3}};
  fail(ErrorKind::usage, "unknown shape '" + shape + "'");
}

Vector interpolate_domain(const Discretization& d, const Vector& u, std::span<const Point3> pts) {
  require(static_cast<std::size_t>(u.size()) == d.n_dom(), ErrorKind::contract, "interpolation needs a domain field");
  const auto& dom = d.mesh().dom;
  Vector out(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool found = false;
    for (std::size_t k = 0; k < d.tets().size() && !found; ++k) {
      const auto lam = d.tets()[k].bary(pts[i]);
      if (*std::min_element(lam.begin(), lam.end()) < -1e-12) continue;
      double s = 0.0;
      for (int j = 0; j < 4; ++j) s += lam[j] * u[dom.tets[k][j]];
      out[static_cast<Eigen::Index>(i)] = s;
      found = true;
    }
    require(found, ErrorKind::contract, "interpolation point lies outside the mesh");
  }
  return out;
}

}  // namespace bdie
