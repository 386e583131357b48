#include "bdie/coefficient.hpp"

#include "bdie/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bdie {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::singular_evaluation: return "singular evaluation";
    case ErrorKind::contract: return "contract violation";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::resource: return "resource error";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::solver: return "solver error";
    case ErrorKind::usage: return "usage error";
  }
  return "error";
}

namespace {

double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double poly_d1(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

double poly_d2(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 2;) v = v * t + static_cast<double>(k * (k - 1)) * c[k];
  return v;
}

double parse_real(std::string_view s) {
  std::string tmp(s);
  std::istringstream in(tmp);
  double v = 0.0;
  in >> v;
  if (!in || !(in >> std::ws).eof()) fail(ErrorKind::parse, "bad number '" + tmp + "' in coefficient id");
  return v;
}

std::vector<double> parse_list(std::string_view s, char sep) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) pos = s.size();
    out.push_back(parse_real(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace

Coefficient::Coefficient(Family family, std::string id) : family_(family), id_(std::move(id)) {}

Coefficient Coefficient::constant(double c) {
  require(c > 0.0 && std::isfinite(c), ErrorKind::contract, "constant coefficient must be positive");
  Coefficient a(Family::constant, c == 1.0 ? "one" : "const:" + std::to_string(c));
  a.c0_ = c;
  a.compute_bounds();
  return a;
}

Coefficient Coefficient::affine(double c0, double alpha) {
  Coefficient a(Family::affine, (c0 == 2.0 && alpha == 1.0)
                                    ? std::string("affine")
                                    : "affine:" + std::to_string(c0) + "," + std::to_string(alpha));
  a.c0_ = c0;
  a.alpha_ = alpha;
  a.compute_bounds();
  return a;
}

Coefficient Coefficient::exponential(double alpha) {
  Coefficient a(Family::exponential, alpha == 1.0 ? std::string("exp") : "exp:" + std::to_string(alpha));
  a.alpha_ = alpha;
  a.compute_bounds();
  return a;
}

Coefficient Coefficient::product(std::array<std::vector<double>, 3> polys) {
  std::string id = "poly:";
  for (int i = 0; i < 3; ++i) {
    if (polys[i].empty()) polys[i] = {1.0};
    for (std::size_t k = 0; k < polys[i].size(); ++k) {
      if (k) id += ",";
      id += std::to_string(polys[i][k]);
    }
    if (i < 2) id += ";";
  }
  Coefficient a(Family::product, id);
  a.polys_ = std::move(polys);
  a.compute_bounds();
  return a;
}

Coefficient Coefficient::from_id(std::string_view id) {
  if (id == "one") return constant(1.0);
  if (id == "affine") return affine(2.0, 1.0);
  if (id == "exp") return exponential(1.0);
  auto colon = id.find(':');
  if (colon == std::string_view::npos) fail(ErrorKind::parse, "unknown coefficient id '" + std::string(id) + "'");
  auto head = id.substr(0, colon);
  auto rest = id.substr(colon + 1);
  if (head == "const") return constant(parse_real(rest));
  if (head == "exp") return exponential(parse_real(rest));
  if (head == "affine") {
    auto v = parse_list(rest, ',');
    if (v.size() != 2) fail(ErrorKind::parse, "affine coefficient needs two numbers");
    return affine(v[0], v[1]);
  }
  if (head == "poly") {
    std::array<std::vector<double>, 3> p;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      std::size_t pos = rest.find(';', start);
      if (pos == std::string_view::npos) pos = rest.size();
      if (start > rest.size()) fail(ErrorKind::parse, "poly coefficient needs three factors");
      p[i] = parse_list(rest.substr(start, pos - start), ',');
      start = pos + 1;
    }
    return product(std::move(p));
  }
  fail(ErrorKind::parse, "unknown coefficient id '" + std::string(id) + "'");
}

double Coefficient::eval(const Point3& x) const {
  switch (family_) {
    case Family::constant: return c0_;
    case Family::affine: return c0_ + alpha_ * x[0];
    case Family::exponential: return std::exp(alpha_ * x[0]);
    case Family::product:
      return poly_eval(polys_[0], x[0]) * poly_eval(polys_[1], x[1]) * poly_eval(polys_[2], x[2]);
  }
  return 0.0;
}

Point3 Coefficient::grad(const Point3& x) const {
  switch (family_) {
    case Family::constant: return Point3::Zero();
    case Family::affine: return Point3(alpha_, 0.0, 0.0);
    case Family::exponential: return Point3(alpha_ * std::exp(alpha_ * x[0]), 0.0, 0.0);
    case Family::product: {
      const double p0 = poly_eval(polys_[0], x[0]);
      const double p1 = poly_eval(polys_[1], x[1]);
      const double p2 = poly_eval(polys_[2], x[2]);
      return Point3(poly_d1(polys_[0], x[0]) * p1 * p2, p0 * poly_d1(polys_[1], x[1]) * p2,
                    p0 * p1 * poly_d1(polys_[2], x[2]));
    }
  }
  return Point3::Zero();
}

double Coefficient::laplacian(const Point3& x) const {
  switch (family_) {
    case Family::constant:
    case Family::affine: return 0.0;
    case Family::exponential: return alpha_ * alpha_ * std::exp(alpha_ * x[0]);
    case Family::product: {
      const double p0 = poly_eval(polys_[0], x[0]);
      const double p1 = poly_eval(polys_[1], x[1]);
      const double p2 = poly_eval(polys_[2], x[2]);
      return poly_d2(polys_[0], x[0]) * p1 * p2 + p0 * poly_d2(polys_[1], x[1]) * p2 +
             p0 * p1 * poly_d2(polys_[2], x[2]);
    }
  }
  return 0.0;
}

double Coefficient::log_laplacian(const Point3& x) const {
  const double a = eval(x);
  return laplacian(x) / a - grad(x).squaredNorm() / (a * a);
}

void Coefficient::compute_bounds() {
  constexpr int n = 21;
  constexpr double box = 1.05;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Point3 x(-box + 2 * box * i / (n - 1), -box + 2 * box * j / (n - 1), -box + 2 * box * k / (n - 1));
        const double v = eval(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  require(lo > 0.0, ErrorKind::validation, "coefficient '" + id_ + "' is not positive on the sampling box");
  a_min_ = lo;
  a_max_ = hi;
}

}  // namespace bdie
