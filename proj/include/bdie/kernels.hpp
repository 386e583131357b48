#pragma once

#include "bdie/coefficient.hpp"

namespace bdie {

inline constexpr double kFourPi = 12.566370614359172953850573533118;
inline constexpr double kSingularGuard = 1e-14;

// Laplace fundamental solution −1/(4π|x−y|).
double fundamental_solution(const Point3& x, const Point3& y);
// Parametrix P(x,y) = fundamental_solution(x,y)/a(y).
double parametrix(const Point3& x, const Point3& y, const Coefficient& a);
// Remainder R(x,y) = (x−y)·∇a(x) / (4π a(y)|x−y|³), the defect of P under the operator in x.
double remainder_R(const Point3& x, const Point3& y, const Coefficient& a);
// Remainder R*(x,y) = Δ(ln a)(y)/(4π|x−y|) + (x−y)·∇a(y)/(4π a(y)|x−y|³).
double remainder_Rstar(const Point3& x, const Point3& y, const Coefficient& a);
// Conormal kernel a(x) ν·∇ₓP(x,y) = a(x) ν·(x−y) / (4π a(y)|x−y|³).
double double_layer_kernel(const Point3& x, const Point3& nu, const Point3& y, const Coefficient& a);

// Throws a singular-evaluation error when |x−y| falls below the guard.
double checked_distance(const Point3& x, const Point3& y);

}  // namespace bdie
