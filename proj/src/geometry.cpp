#include "bzeta/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "bzeta/errors.hpp"

namespace bzeta::geometry {

UnitDirection UnitDirection::make(Vec2 v) {
  if (std::abs(norm(v) - 1.0) > kNormTolerance) {
    throw ContractViolation("UnitDirection: vector is not of unit norm");
  }
  return UnitDirection(v);
}

UnitDirection UnitDirection::normalized(Vec2 v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw ContractViolation("UnitDirection: zero vector");
  return UnitDirection(v * (1.0 / n));
}

std::string Violation::describe() const {
  char buf[128];
  switch (kind) {
    case Kind::TooFewObstacles:
      return "fewer than three obstacles";
    case Kind::Overlap:
      std::snprintf(buf, sizeof buf, "overlap (%d,%d) clearance %.6g", i + 1, j + 1, clearance);
      return buf;
    case Kind::Eclipse:
      std::snprintf(buf, sizeof buf, "eclipse (%d,%d;%d) clearance %.6g", i + 1, j + 1, k + 1,
                    clearance);
      return buf;
  }
  return {};
}

std::string ValidationReport::first_violation() const {
  return violations.empty() ? std::string{} : violations.front().describe();
}

double hull_clearance(const Disk& di, const Disk& dj, const Disk& dk) {
  // hull(D_i u D_j) is the union of the disks interpolated linearly in centre
  // and radius; the clearance is convex in the interpolation parameter.
  auto clearance = [&](double t) {
    const Vec2 c = (1.0 - t) * di.center + t * dj.center;
    const double a = (1.0 - t) * di.radius + t * dj.radius;
    return norm(dk.center - c) - a - dk.radius;
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = clearance(x1), f2 = clearance(x2);
  for (int it = 0; it < 90; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - kInvPhi * (hi - lo); f1 = clearance(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + kInvPhi * (hi - lo); f2 = clearance(x2);
    }
  }
  return std::min({clearance(0.0), clearance(1.0), f1, f2});
}

ValidationReport validate(const Configuration& config) {
  const int r = config.size();
  if (r < 2) throw MalformedInput("configuration needs at least two obstacles");
  for (const auto& d : config.disks) {
    if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !std::isfinite(d.center.x) ||
        !std::isfinite(d.center.y)) {
      throw MalformedInput("disk radius must be positive and coordinates finite");
    }
  }

  ValidationReport report;
  if (r < 3) report.violations.push_back({Violation::Kind::TooFewObstacles});

  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const double gap = norm(config[i].center - config[j].center) - config[i].radius -
                         config[j].radius;
      if (gap <= kClearanceTolerance) {
        report.violations.push_back({Violation::Kind::Overlap, i, j, -1, gap});
      }
    }
  }
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      for (int k = 0; k < r; ++k) {
        if (k == i || k == j) continue;
        const double c = hull_clearance(config[i], config[j], config[k]);
        if (c <= kClearanceTolerance) {
          report.violations.push_back({Violation::Kind::Eclipse, i, j, k, c});
        }
      }
    }
  }
  report.passed = report.violations.empty();
  return report;
}

Vec2 boundary_point(const Disk& disk, double angle) {
  return disk.center + disk.radius * Vec2{std::cos(angle), std::sin(angle)};
}

UnitDirection inward_normal(const Disk&, double angle) {
  return UnitDirection::unchecked({-std::cos(angle), -std::sin(angle)});
}

UnitDirection reflect(const UnitDirection& v, const UnitDirection& n) {
  if (std::abs(norm(v.vec()) - 1.0) > UnitDirection::kNormTolerance ||
      std::abs(norm(n.vec()) - 1.0) > UnitDirection::kNormTolerance) {
    throw ContractViolation("reflect: arguments must be unit vectors");
  }
  const double vn = dot(v.vec(), n.vec());
  return UnitDirection::unchecked(v.vec() - 2.0 * vn * n.vec());
}

double min_separation(const Configuration& config) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.size(); ++i)
    for (int j = i + 1; j < config.size(); ++j)
      best = std::min(best, norm(config[i].center - config[j].center) - config[i].radius -
                                config[j].radius);
  return best;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

Configuration config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw MalformedInput("configuration must be a JSON object");
  if (doc.contains("format") && doc.at("format") != kConfigFormat) {
    throw MalformedInput("unsupported configuration format: " + doc.at("format").dump());
  }
  if (!doc.contains("disks") || !doc.at("disks").is_array()) {
    throw MalformedInput("configuration needs a \"disks\" array");
  }
  Configuration config;
  try {
    for (const auto& d : doc.at("disks")) {
      const auto& c = d.at("center");
      if (!c.is_array() || c.size() != 2) throw MalformedInput("center must be [x, y]");
      config.disks.push_back(
          {{c[0].get<double>(), c[1].get<double>()}, d.at("radius").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad disk entry: ") + e.what());
  }
  return config;
}

nlohmann::json config_to_json(const Configuration& config) {
  nlohmann::json disks = nlohmann::json::array();
  for (const auto& d : config.disks) {
    disks.push_back({{"center", {d.center.x, d.center.y}}, {"radius", d.radius}});
  }
  return {{"format", kConfigFormat}, {"disks", disks}};
}

Configuration load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open configuration file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return config_from_json(doc);
}

std::string config_hash(const Configuration& config) {
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Configuration equilateral_three_disk(double side, double radius) {
  const double rc = side / std::sqrt(3.0);
  Configuration config;
  for (int i = 0; i < 3; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 3.0;
    config.disks.push_back({{rc * std::cos(phi), rc * std::sin(phi)}, radius});
  }
  return config;
}

}  // namespace bzeta::geometry
