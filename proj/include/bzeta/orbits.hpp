#pragma once

#include <optional>
#include <vector>

#include "bzeta/geometry.hpp"
#include "bzeta/symbolic.hpp"

namespace bzeta::orbits {

using geometry::Configuration;
using geometry::Vec2;
using symbolic::Cycle;

/// Periodic billiard ray with a prescribed primitive itinerary. Index i runs
/// over bounces in the order of the cycle word; flight i joins P_i to P_{i+1}.
struct PeriodicOrbit {
  Cycle cycle;
  std::vector<double> angles;             // boundary angle of P_i on its disk
  std::vector<Vec2> points;               // P_i
  std::vector<double> flights;            // |P_{i+1} - P_i|
  std::vector<double> cos_incidence;      // |<e_i, n_i>| at P_i
  std::vector<double> boundary_curvature; // 1 / radius of the disk hit at P_i
  double period = 0.0;                    // T = sum of flights
  double residual = 0.0;                  // max |dL/dtheta_i|
  double reflection_residual = 0.0;       // max |reflect(e_{i-1}, n_i) - e_i|
  double shadow_clearance = 0.0;          // min distance to a non-incident obstacle

  double primitive_period() const { return period; }
  int reflections() const { return cycle.length(); }
};

struct SolveOptions {
  double tol = 1e-12;
  int max_iterations = 200;
  int max_halvings = 30;
  /// Starting angles; defaults to each point facing the midpoint of the
  /// neighbouring centres.
  std::optional<std::vector<double>> initial_angles;
};

/// Bumped whenever the cache-visible contents of an orbit record change.
inline constexpr int kSolverVersion = 2;

/// Length functional L(theta) = sum_i |p_{i+1}(theta_{i+1}) - p_i(theta_i)|.
double length_functional(const Configuration& config, const Cycle& cycle,
                         const std::vector<double>& angles);

/// Damped Newton on grad L = 0. Throws SolverFailure when the iteration
/// budget runs out and GeometryError when the stationary point is not a
/// genuine reflecting ray avoiding all other obstacles.
PeriodicOrbit solve_orbit(const Configuration& config, const Cycle& cycle,
                          const SolveOptions& options = {});

/// Builds all derived orbit data from converged angles and enforces the
/// reflection and shadow invariants.
PeriodicOrbit orbit_from_angles(const Configuration& config, const Cycle& cycle,
                                std::vector<double> angles);

std::vector<double> default_initial_angles(const Configuration& config, const Cycle& cycle);

struct Repetition {
  double tau = 0.0;            // r * T
  double tau_primitive = 0.0;  // T
  int reflections = 0;         // r * n
  int count = 1;               // r
};

/// The r-fold traversal of a primitive orbit (r >= 1).
Repetition orbit_with_repetition(const PeriodicOrbit& orbit, int r);

}  // namespace bzeta::orbits
