#pragma once

// Linear stability of periodic rays in the plane, computed two independent
// ways: by transporting the unstable wavefront curvature around the orbit and
// by multiplying 2x2 monodromy blocks.

#include <array>
#include <vector>

#include "bzeta/orbits.hpp"

namespace bzeta::stability {

using orbits::PeriodicOrbit;

/// Free flight over length l: kappa / (1 + l kappa).
double propagate_flight(double kappa, double length);

/// Convex mirror: kappa + 2 kappa_B / cos(phi).
double reflect_curvature(double kappa, double boundary_curvature, double cos_incidence);

/// Post-reflection unstable curvature kappa_i at every bounce.
struct CurvatureSequence {
  std::vector<double> kappa;
  int cycles_used = 0;  // transport sweeps until the fixed point settled
};

/// Fixed point of the once-around transport, iterated from `initial` (or the
/// boundary curvature when not given). Throws NumericalError on
/// non-contraction after 500 sweeps.
CurvatureSequence unstable_curvatures(const PeriodicOrbit& orbit, double initial = -1.0);

/// prod_i (1 + f_i kappa_i).
double expansion_factor(const PeriodicOrbit& orbit, const CurvatureSequence& kappas);

/// Suspension-flow density -(1/2) kappa / (1 + kappa y); integrating 2x this
/// over one flight reproduces -log(1 + f kappa).
double suspension_density(double kappa, double y);

struct Mat2 {
  std::array<double, 4> a{1.0, 0.0, 0.0, 1.0};  // row major
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }
  double trace() const { return a[0] + a[3]; }
  double det() const { return a[0] * a[3] - a[1] * a[2]; }
};
Mat2 operator*(const Mat2& x, const Mat2& y);

Mat2 flight_block(double length);
/// Reflection block including the orientation factor -1.
Mat2 reflection_block(double boundary_curvature, double cos_incidence);

/// Product over one primitive period, based just after the reflection at P_0.
Mat2 monodromy(const PeriodicOrbit& orbit);

/// Expanding eigenvalue of a unimodular hyperbolic 2x2 matrix (signed).
double expanding_eigenvalue(const Mat2& m);

/// |det(Id - P^r)| = |(1 - Lambda^r)(1 - Lambda^-r)|.
double det_id_minus(double lambda, int r);

struct StabilityRecord {
  double lambda = 0.0;          // signed expanding eigenvalue per primitive period
  int sign = 1;                 // sign of lambda
  double d_gamma = 0.0;         // log |lambda|
  double lambda_curvature = 0;  // |lambda| from the curvature product
  std::vector<double> det1p;            // index r-1 -> |det(Id - P^r)|
  std::vector<double> weight_half;      // tau# / |det|^{1/2}
  std::vector<double> weight_full;      // tau# / |det|

  double delta_gamma() const { return -d_gamma; }
  int r_max() const { return static_cast<int>(det1p.size()); }
};

/// Computes both stability routes, cross-checks |lambda| to 1e-8 relative
/// (InternalConsistencyError otherwise) and tabulates weights for r = 1..r_max.
StabilityRecord weights(const PeriodicOrbit& orbit, const CurvatureSequence& kappas, int r_max);

}  // namespace bzeta::stability
