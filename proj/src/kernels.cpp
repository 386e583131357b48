#include "bdie/kernels.hpp"

#include "bdie/error.hpp"

#include <cmath>

namespace bdie {

double checked_distance(const Point3& x, const Point3& y) {
  const double r = (x - y).norm();
  if (!(r >= kSingularGuard)) fail(ErrorKind::singular_evaluation, "kernel evaluated at coincident points");
  return r;
}

double fundamental_solution(const Point3& x, const Point3& y) {
  return -1.0 / (kFourPi * checked_distance(x, y));
}

double parametrix(const Point3& x, const Point3& y, const Coefficient& a) {
  return fundamental_solution(x, y) / a.eval(y);
}

double remainder_R(const Point3& x, const Point3& y, const Coefficient& a) {
  const double r = checked_distance(x, y);
  return (x - y).dot(a.grad(x)) / (kFourPi * a.eval(y) * r * r * r);
}

// -div_y(P(x, y) grad a(y)) expanded; the gradient term enters with a plus sign.
double remainder_Rstar(const Point3& x, const Point3& y, const Coefficient& a) {
  const double r = checked_distance(x, y);
  const double ay = a.eval(y);
  return a.log_laplacian(y) / (kFourPi * r) + (x - y).dot(a.grad(y)) / (kFourPi * ay * r * r * r);
}

double double_layer_kernel(const Point3& x, const Point3& nu, const Point3& y, const Coefficient& a) {
  const double r = checked_distance(x, y);
  return a.eval(x) * nu.dot(x - y) / (kFourPi * a.eval(y) * r * r * r);
}

}  // namespace bdie
