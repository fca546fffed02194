#include "bzeta/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bzeta/errors.hpp"

namespace bzeta::orbits {

namespace {

using geometry::dot;
using geometry::norm;

struct Derivatives {
  double length = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

Vec2 tangent(double a, double th) { return {-a * std::sin(th), a * std::cos(th)}; }
Vec2 tangent_derivative(double a, double th) { return {-a * std::cos(th), -a * std::sin(th)}; }

// t1^T (I - e e^T) t2
double projected(const Vec2& t1, const Vec2& t2, const Vec2& e) {
  return dot(t1, t2) - dot(t1, e) * dot(t2, e);
}

Derivatives derivatives(const Configuration& config, const symbolic::Word& word,
                        const std::vector<double>& th) {
  const int n = static_cast<int>(word.size());
  Derivatives d;
  d.gradient = Eigen::VectorXd::Zero(n);
  d.hessian = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const auto& di = config[word[i]];
    const auto& dj = config[word[j]];
    const Vec2 u = geometry::boundary_point(dj, th[j]) - geometry::boundary_point(di, th[i]);
    const double len = norm(u);
    const Vec2 e = u * (1.0 / len);
    const Vec2 ti = tangent(di.radius, th[i]);
    const Vec2 tj = tangent(dj.radius, th[j]);
    d.length += len;
    d.gradient[i] -= dot(e, ti);
    d.gradient[j] += dot(e, tj);
    d.hessian(i, i) += projected(ti, ti, e) / len - dot(e, tangent_derivative(di.radius, th[i]));
    d.hessian(j, j) += projected(tj, tj, e) / len + dot(e, tangent_derivative(dj.radius, th[j]));
    const double off = -projected(ti, tj, e) / len;
    d.hessian(i, j) += off;
    d.hessian(j, i) += off;
  }
  return d;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double length_functional(const Configuration& config, const Cycle& cycle,
                         const std::vector<double>& angles) {
  const auto& w = cycle.word();
  const std::size_t n = w.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    total += norm(geometry::boundary_point(config[w[j]], angles[j]) -
                  geometry::boundary_point(config[w[i]], angles[i]));
  }
  return total;
}

std::vector<double> default_initial_angles(const Configuration& config, const Cycle& cycle) {
  const auto& w = cycle.word();
  const std::size_t n = w.size();
  std::vector<double> th(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = config[w[(i + n - 1) % n]].center;
    const Vec2 next = config[w[(i + 1) % n]].center;
    const Vec2 target = 0.5 * (prev + next) - config[w[i]].center;
    th[i] = std::atan2(target.y, target.x);
  }
  return th;
}

PeriodicOrbit solve_orbit(const Configuration& config, const Cycle& cycle,
                          const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw ContractViolation("solve_orbit: tol must be positive");
  const auto& word = cycle.word();
  for (int s : word) {
    if (s < 0 || s >= config.size()) throw ContractViolation("cycle symbol outside configuration");
  }
  std::vector<double> th =
      options.initial_angles ? *options.initial_angles : default_initial_angles(config, cycle);
  if (th.size() != word.size()) throw ContractViolation("initial angle count mismatch");
  const int n = static_cast<int>(th.size());

  double best = std::numeric_limits<double>::infinity();
  Derivatives cur = derivatives(config, word, th);
  for (int it = 0; it < options.max_iterations; ++it) {
    const double res = max_abs(cur.gradient);
    best = std::min(best, res);
    if (res <= options.tol) return orbit_from_angles(config, cycle, std::move(th));

    Eigen::VectorXd step;
    Eigen::LLT<Eigen::MatrixXd> llt(cur.hessian);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(-cur.gradient);
    } else {
      step = -cur.gradient;  // descent fallback while the Hessian is indefinite
    }
    const double slope = cur.gradient.dot(step);
    if (!(slope < 0.0)) step = -cur.gradient;

    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial(th.size());
    for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
      for (int i = 0; i < n; ++i) trial[i] = th[i] + alpha * step[i];
      Derivatives next = derivatives(config, word, trial);
      const bool armijo = next.length <= cur.length + 1e-4 * alpha * cur.gradient.dot(step);
      // Near the solution L is flat to rounding; accept on gradient decrease.
      const bool flat = next.length <= cur.length + 1e-13 * cur.length &&
                        max_abs(next.gradient) < res;
      if (armijo || flat) {
        th = trial;
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  best = std::min(best, max_abs(cur.gradient));
  if (best <= options.tol) return orbit_from_angles(config, cycle, std::move(th));
  throw SolverFailure("solve_orbit did not converge for cycle " + cycle.str(), best);
}

PeriodicOrbit orbit_from_angles(const Configuration& config, const Cycle& cycle,
                                std::vector<double> angles) {
  const auto& w = cycle.word();
  const std::size_t n = w.size();
  if (angles.size() != n) throw ContractViolation("angle count mismatch");

  PeriodicOrbit o;
  o.cycle = cycle;
  // Keep angles in (-pi, pi] so cached values are canonical.
  for (double& a : angles) a = std::remainder(a, 2.0 * M_PI);
  o.angles = std::move(angles);
  o.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    o.points[i] = geometry::boundary_point(config[w[i]], o.angles[i]);
    o.boundary_curvature.push_back(config[w[i]].curvature());
  }
  std::vector<geometry::UnitDirection> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = o.points[(i + 1) % n] - o.points[i];
    o.flights.push_back(norm(u));
    o.period += o.flights.back();
    dirs.push_back(geometry::UnitDirection::normalized(u));
  }
  o.residual = max_abs(derivatives(config, w, o.angles).gradient);

  const double d0 = geometry::min_separation(config);
  o.shadow_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto normal = geometry::inward_normal(config[w[i]], o.angles[i]);
    const auto& in = dirs[(i + n - 1) % n];
    const auto& out = dirs[i];
    const double cin = dot(in.vec(), normal.vec());
    const double cout = dot(out.vec(), normal.vec());
    if (!(cin > 0.0 && cout < 0.0)) {
      throw GeometryError("cycle " + cycle.str() + ": stationary point is not a reflection at bounce " +
                          std::to_string(i));
    }
    const auto reflected = geometry::reflect(in, normal);
    o.reflection_residual = std::max(o.reflection_residual, norm(reflected.vec() - out.vec()));
    o.cos_incidence.push_back(-cout);

    if (o.flights[i] < d0 - 1e-9) {
      throw GeometryError("cycle " + cycle.str() + ": flight shorter than obstacle separation");
    }
    const Vec2 a = o.points[i], b = o.points[(i + 1) % n];
    for (int k = 0; k < config.size(); ++k) {
      if (k == w[i] || k == w[(i + 1) % n]) continue;
      const double c = geometry::point_segment_distance(config[k].center, a, b) - config[k].radius;
      o.shadow_clearance = std::min(o.shadow_clearance, c);
    }
  }
  if (o.shadow_clearance <= geometry::kClearanceTolerance) {
    throw GeometryError("cycle " + cycle.str() + ": ray is shadowed by another obstacle");
  }
  return o;
}

Repetition orbit_with_repetition(const PeriodicOrbit& orbit, int r) {
  if (r < 1) throw ContractViolation("repetition count must be >= 1");
  return {r * orbit.period, orbit.period, r * orbit.reflections(), r};
}

}  // namespace bzeta::orbits
