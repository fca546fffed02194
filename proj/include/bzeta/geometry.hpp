#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bzeta::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double a) { x *= a; y *= a; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Unit vector in the plane. Construction through make() checks the norm.
class UnitDirection {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws ContractViolation unless |v| = 1 within kNormTolerance.
  static UnitDirection make(Vec2 v);
  /// Normalizes v; throws ContractViolation for the zero vector.
  static UnitDirection normalized(Vec2 v);
  /// Wraps v without any check (used for results of norm-preserving maps).
  static UnitDirection unchecked(Vec2 v) { return UnitDirection(v); }

  const Vec2& vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }

 private:
  explicit UnitDirection(Vec2 v) : v_(v) {}
  Vec2 v_;
};

struct Disk {
  Vec2 center;
  double radius = 1.0;

  double curvature() const { return 1.0 / radius; }
};

/// Ordered obstacle list; obstacle i is addressed 0-based in code and
/// reported 1-based to users.
struct Configuration {
  std::vector<Disk> disks;

  int size() const { return static_cast<int>(disks.size()); }
  const Disk& operator[](int i) const { return disks[static_cast<std::size_t>(i)]; }
};

/// Tolerance on every clearance test (disjointness and shadow margin).
inline constexpr double kClearanceTolerance = 1e-9;

struct Violation {
  enum class Kind { TooFewObstacles, Overlap, Eclipse };
  Kind kind;
  int i = -1;  // 0-based
  int j = -1;
  int k = -1;  // shadowed obstacle for Eclipse
  double clearance = 0.0;

  /// Human-readable, 1-based, e.g. "eclipse (1,3;2)".
  std::string describe() const;
};

struct ValidationReport {
  bool passed = false;
  std::vector<Violation> violations;

  /// First violated constraint, or empty string when passed.
  std::string first_violation() const;
};

/// Checks r >= 3, pairwise disjointness and the non-eclipse condition.
/// Throws MalformedInput for fewer than two obstacles or a non-positive radius.
ValidationReport validate(const Configuration& config);

/// Distance from disk `k` to the convex hull of disks i and j. Negative when
/// they intersect (it is the signed clearance of the disks' centers minus
/// radii along the nearest interpolated disk).
double hull_clearance(const Disk& di, const Disk& dj, const Disk& dk);

Vec2 boundary_point(const Disk& disk, double angle);
UnitDirection inward_normal(const Disk& disk, double angle);

/// Specular reflection v' = v - 2<v,n>n. Both inputs must be unit vectors.
UnitDirection reflect(const UnitDirection& v, const UnitDirection& n);

/// min over pairs of |c_i - c_j| - a_i - a_j.
double min_separation(const Configuration& config);

/// Euclidean distance from point p to the closed segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// --- serialization ("billiard-config/1") ---

inline constexpr const char* kConfigFormat = "billiard-config/1";

Configuration config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const Configuration& config);
Configuration load_config(const std::string& path);

/// FNV-1a 64-bit digest of the canonical JSON form, as 16 hex digits.
std::string config_hash(const Configuration& config);

/// Three equal disks of the given radius centred on an equilateral triangle
/// of side `side`, first vertex on the positive x-axis side of the centroid.
Configuration equilateral_three_disk(double side, double radius);

}  // namespace bzeta::geometry
