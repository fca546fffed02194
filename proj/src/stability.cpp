#include "bzeta/stability.hpp"

#include <cmath>

#include "bzeta/errors.hpp"

namespace bzeta::stability {

double propagate_flight(double kappa, double length) {
  const double denom = 1.0 + length * kappa;
  if (!(denom > 0.0)) throw ContractViolation("propagate_flight: focal degeneracy 1 + l*kappa <= 0");
  return kappa / denom;
}

double reflect_curvature(double kappa, double boundary_curvature, double cos_incidence) {
  if (!(cos_incidence > 0.0)) throw ContractViolation("reflect_curvature: grazing incidence");
  return kappa + 2.0 * boundary_curvature / cos_incidence;
}

CurvatureSequence unstable_curvatures(const PeriodicOrbit& orbit, double initial) {
  const std::size_t n = orbit.flights.size();
  const auto& f = orbit.flights;
  const auto& kb = orbit.boundary_curvature;
  const auto& c = orbit.cos_incidence;

  auto sweep = [&](double k0, std::vector<double>* trace) {
    double k = k0;
    for (std::size_t i = 0; i < n; ++i) {
      if (trace) (*trace)[i] = k;
      const std::size_t j = (i + 1) % n;
      k = reflect_curvature(propagate_flight(k, f[i]), kb[j], c[j]);
    }
    return k;
  };

  CurvatureSequence out;
  out.kappa.assign(n, 0.0);
  double k = initial > 0.0 ? initial : kb[0];
  for (int cycle = 1; cycle <= 500; ++cycle) {
    const double next = sweep(k, nullptr);
    const bool settled = std::abs(next - k) < 1e-13 * std::max(1.0, std::abs(next));
    k = next;
    if (settled) {
      out.cycles_used = cycle;
      sweep(k, &out.kappa);
      for (double v : out.kappa) {
        if (!(v > 0.0)) throw NumericalError("unstable curvature is not positive");
      }
      return out;
    }
  }
  throw NumericalError("unstable curvature transport did not contract for cycle " +
                       orbit.cycle.str());
}

double expansion_factor(const PeriodicOrbit& orbit, const CurvatureSequence& kappas) {
  if (kappas.kappa.size() != orbit.flights.size()) {
    throw ContractViolation("expansion_factor: curvature/flight length mismatch");
  }
  double prod = 1.0;
  for (std::size_t i = 0; i < orbit.flights.size(); ++i) {
    prod *= 1.0 + orbit.flights[i] * kappas.kappa[i];
  }
  return prod;
}

double suspension_density(double kappa, double y) { return -0.5 * kappa / (1.0 + kappa * y); }

Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 z;
  z.a = {x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0), x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1),
         x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0), x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1)};
  return z;
}

Mat2 flight_block(double length) { return Mat2{{1.0, length, 0.0, 1.0}}; }

Mat2 reflection_block(double boundary_curvature, double cos_incidence) {
  return Mat2{{-1.0, 0.0, -2.0 * boundary_curvature / cos_incidence, -1.0}};
}

Mat2 monodromy(const PeriodicOrbit& orbit) {
  const std::size_t n = orbit.flights.size();
  Mat2 m;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    m = flight_block(orbit.flights[i]) * m;
    m = reflection_block(orbit.boundary_curvature[j], orbit.cos_incidence[j]) * m;
  }
  return m;
}

double expanding_eigenvalue(const Mat2& m) {
  const double tr = m.trace();
  if (!(std::abs(tr) > 2.0)) throw NumericalError("monodromy is not hyperbolic");
  // Blocks are unimodular exactly; the computed det only carries rounding.
  const double root = std::sqrt(tr * tr - 4.0);
  return 0.5 * (tr + std::copysign(root, tr));
}

double det_id_minus(double lambda, int r) {
  if (r < 1) throw ContractViolation("det_id_minus: r must be >= 1");
  const double x = std::pow(lambda, r);
  const double y = 1.0 / x;
  return std::abs(x) * (1.0 - y) * (1.0 - y);
}

StabilityRecord weights(const PeriodicOrbit& orbit, const CurvatureSequence& kappas, int r_max) {
  if (r_max < 1) throw ContractViolation("weights: r_max must be >= 1");
  StabilityRecord rec;
  const Mat2 m = monodromy(orbit);
  double scale = 1.0;
  for (double v : m.a) scale += v * v;
  if (std::abs(m.det() - 1.0) > 1e-12 * scale) {
    throw InternalConsistencyError("monodromy is not unimodular for cycle " + orbit.cycle.str());
  }
  rec.lambda = expanding_eigenvalue(m);
  rec.sign = rec.lambda < 0.0 ? -1 : 1;
  rec.lambda_curvature = expansion_factor(orbit, kappas);
  const double rel = std::abs(std::abs(rec.lambda) - rec.lambda_curvature) / rec.lambda_curvature;
  if (rel > 1e-8) {
    throw InternalConsistencyError("curvature and monodromy expansion disagree for cycle " +
                                   orbit.cycle.str());
  }
  rec.d_gamma = std::log(std::abs(rec.lambda));
  const double tau = orbit.primitive_period();
  for (int r = 1; r <= r_max; ++r) {
    const double det = det_id_minus(rec.lambda, r);
    rec.det1p.push_back(det);
    rec.weight_half.push_back(tau / std::sqrt(det));
    rec.weight_full.push_back(tau / det);
  }
  return rec;
}

}  // namespace bzeta::stability
