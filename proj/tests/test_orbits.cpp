#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bzeta/errors.hpp"
#include "bzeta/orbits.hpp"
#include "fixture.hpp"

using namespace bzeta;
using namespace bzeta::orbits;
using symbolic::parse_word;

namespace {

Cycle cyc(const std::string& w) { return Cycle::from_word(parse_word(w), 3); }

// Closed polygon length through points on the disks, written from scratch.
double polygon_length(const Configuration& c, const symbolic::Word& w,
                      const std::vector<double>& th) {
  double total = 0.0;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = c[w[i]];
    const auto& b = c[w[(i + 1) % n]];
    const double ax = a.center.x + a.radius * std::cos(th[i]);
    const double ay = a.center.y + a.radius * std::sin(th[i]);
    const double bx = b.center.x + b.radius * std::cos(th[(i + 1) % n]);
    const double by = b.center.y + b.radius * std::sin(th[(i + 1) % n]);
    total += std::hypot(bx - ax, by - ay);
  }
  return total;
}

// Derivative-free compass search, each point started facing the centroid.
double compass_minimum(const Configuration& c, const symbolic::Word& w) {
  std::vector<double> th;
  for (int s : w) th.push_back(std::atan2(-c[s].center.y, -c[s].center.x));
  double best = polygon_length(c, w, th);
  for (double step = 0.2; step > 1e-13; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < th.size(); ++i) {
        for (double dir : {1.0, -1.0}) {
          th[i] += dir * step;
          const double v = polygon_length(c, w, th);
          if (v < best) {
            best = v;
            improved = true;
          } else {
            th[i] -= dir * step;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST(Orbits, TwoBounce) {
  const auto o = solve_orbit(fixture::eq6(), cyc("12"));
  EXPECT_NEAR(o.period, 8.0, 1e-12);
  for (double c : o.cos_incidence) EXPECT_NEAR(c, 1.0, 1e-12);
}

TEST(Orbits, Triangle) {
  const auto o = solve_orbit(fixture::eq6(), cyc("123"));
  EXPECT_NEAR(o.period, 3.0 * (6.0 - std::sqrt(3.0)), 1e-10);
  for (double c : o.cos_incidence) EXPECT_NEAR(c, std::cos(std::numbers::pi / 6), 1e-10);
}

TEST(Orbits, LongerCyclesMatchCompassSearch) {
  for (const char* w : {"1213", "12123", "121323"}) {
    const auto o = solve_orbit(fixture::eq6(), cyc(w));
    EXPECT_NEAR(o.period, compass_minimum(fixture::eq6(), parse_word(w)), 1e-8) << w;
  }
}

TEST(Orbits, Repetitions) {
  const auto two = solve_orbit(fixture::eq6(), cyc("12"));
  const auto r2 = orbit_with_repetition(two, 2);
  EXPECT_NEAR(r2.tau, 16.0, 1e-12);
  EXPECT_NEAR(r2.tau_primitive, 8.0, 1e-12);
  EXPECT_EQ(r2.reflections, 4);
  const auto tri = solve_orbit(fixture::eq6(), cyc("123"));
  EXPECT_EQ(orbit_with_repetition(tri, 1).tau, orbit_with_repetition(tri, 1).tau_primitive);
  EXPECT_EQ(orbit_with_repetition(tri, 3).reflections, 9);
  EXPECT_EQ(orbit_with_repetition(tri, 3).reflections % 2, 1);
  EXPECT_THROW(orbit_with_repetition(tri, 0), ContractViolation);
}

TEST(Orbits, UniqueFromRandomStarts) {
  const auto& c = fixture::eq6();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (const char* w : {"1213", "12132", "1213123"}) {
    const auto ref = solve_orbit(c, cyc(w));
    for (int trial = 0; trial < 5; ++trial) {
      SolveOptions opt;
      auto init = default_initial_angles(c, cyc(w));
      for (double& a : init) a += jitter(rng);
      opt.initial_angles = init;
      const auto o = solve_orbit(c, cyc(w), opt);
      for (std::size_t i = 0; i < o.angles.size(); ++i) {
        const double d = std::remainder(o.angles[i] - ref.angles[i], 2 * std::numbers::pi);
        EXPECT_NEAR(d, 0.0, 1e-8) << w;
      }
    }
  }
}

TEST(Orbits, RotationEquivariance) {
  const auto& c = fixture::eq6();
  const double a = 2 * std::numbers::pi / 3;
  for (const char* w : {"1213", "12323", "1213132"}) {
    auto word = parse_word(w);
    const auto o = solve_orbit(c, cyc(w));
    for (int& s : word) s = (s + 1) % 3;
    const auto p = solve_orbit(c, Cycle::from_word(word, 3));
    EXPECT_NEAR(p.period, o.period, 1e-9);
    for (const auto& q : o.points) {
      const geometry::Vec2 rq{std::cos(a) * q.x - std::sin(a) * q.y,
                              std::sin(a) * q.x + std::cos(a) * q.y};
      double nearest = 1e9;
      for (const auto& z : p.points) nearest = std::min(nearest, geometry::norm(z - rq));
      EXPECT_LT(nearest, 1e-9) << w;
    }
  }
}

TEST(Orbits, DatabaseInvariants) {
  const auto& db = fixture::db(12);
  const double d0 = db.min_separation();
  for (const auto& rec : db.records()) {
    const auto& o = rec.orbit;
    EXPECT_GE(o.period, rec.reflections() * d0 * (1 - 1e-12));
    for (double f : o.flights) EXPECT_GE(f, d0 - 1e-12);
    EXPECT_GT(o.shadow_clearance, 1e-6) << o.cycle.str();
    EXPECT_LT(o.reflection_residual, 1e-10) << o.cycle.str();
    double sum = 0.0;
    for (double f : o.flights) sum += f;
    EXPECT_NEAR(sum, o.period, 1e-12 * o.period);
  }
}

TEST(Orbits, NonPrimitiveRejected) {
  EXPECT_THROW(Cycle::from_word(parse_word("1212"), 3), ContractViolation);
}
