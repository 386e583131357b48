#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace bdie {

using Point3 = Eigen::Vector3d;

// Smooth positive diffusion coefficient a(x) with analytic derivatives.
// Built-in families: constant, affine c0 + alpha*x1, exponential e^{alpha*x1},
// and separable products prod_i p_i(x_i) of polynomials.
class Coefficient {
 public:
  enum class Family { constant, affine, exponential, product };

  static Coefficient constant(double c);
  static Coefficient affine(double c0, double alpha);
  static Coefficient exponential(double alpha);
  // polys[i] holds the monomial coefficients of p_i in ascending order.
  static Coefficient product(std::array<std::vector<double>, 3> polys);

  // Accepted ids: "one", "affine", "exp", "const:<c>", "affine:<c0>,<alpha>",
  // "exp:<alpha>", "poly:<p1>;<p2>;<p3>" with comma-separated coefficients.
  static Coefficient from_id(std::string_view id);

  const std::string& id() const noexcept { return id_; }
  Family family() const noexcept { return family_; }
  bool is_constant() const noexcept { return family_ == Family::constant; }

  double eval(const Point3& x) const;
  Point3 grad(const Point3& x) const;
  double laplacian(const Point3& x) const;
  // Laplacian of ln a = Δa/a − |∇a|²/a².
  double log_laplacian(const Point3& x) const;

  // Bounds over the sampling box [-1.05, 1.05]^3, which covers every built-in domain.
  double a_min() const noexcept { return a_min_; }
  double a_max() const noexcept { return a_max_; }

 private:
  Coefficient(Family family, std::string id);
  void compute_bounds();

  Family family_;
  std::string id_;
  double c0_ = 1.0;
  double alpha_ = 0.0;
  std::array<std::vector<double>, 3> polys_{};
  double a_min_ = 1.0;
  double a_max_ = 1.0;
};

}  // namespace bdie
