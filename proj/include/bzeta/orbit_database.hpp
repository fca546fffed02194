#pragma once

#include <map>
#include <string>
#include <vector>

#include "bzeta/errors.hpp"
#include "bzeta/geometry.hpp"
#include "bzeta/orbits.hpp"
#include "bzeta/stability.hpp"
#include "bzeta/symbolic.hpp"

namespace bzeta {

/// Everything known about one primitive periodic ray.
struct OrbitRecord {
  orbits::PeriodicOrbit orbit;
  stability::CurvatureSequence curvature;
  stability::StabilityRecord stability;

  const symbolic::Cycle& cycle() const { return orbit.cycle; }
  int reflections() const { return orbit.reflections(); }
  double period() const { return orbit.period; }
  /// |det(Id - P^r)| for any r >= 1.
  double det_id_minus(int r) const { return stability::det_id_minus(stability.lambda, r); }
};

/// Cache file written for a different configuration.
class StaleCache : public Error {
 public:
  using Error::Error;
};

/// All primitive cycles of length 2..n_max of one configuration, ordered by
/// length and then canonical word. Summation order over the database is this
/// order everywhere, which keeps reductions bit-reproducible.
class OrbitDatabase {
 public:
  OrbitDatabase(std::string config_hash, int alphabet, int n_max, double min_separation,
                std::vector<OrbitRecord> records);

  const std::string& config_hash() const { return hash_; }
  int alphabet() const { return r_; }
  int n_max() const { return n_max_; }
  double min_separation() const { return d0_; }
  const std::vector<OrbitRecord>& records() const { return records_; }

  /// Orbits with period strictly below this bound are all present (every
  /// missing orbit has at least n_max + 1 flights of length >= d0).
  double complete_period() const { return (n_max_ + 1) * d0_; }

  /// Record for a canonical primitive word, or nullptr.
  const OrbitRecord* find(const symbolic::Word& canonical) const;
  const OrbitRecord* find(const std::string& word) const;

 private:
  std::string hash_;
  int r_;
  int n_max_;
  double d0_;
  std::vector<OrbitRecord> records_;
  std::map<std::string, std::size_t> index_;
};

inline constexpr int kDefaultRepetitionTable = 6;

/// Solves every primitive cycle up to n_max on `jobs` worker threads; the
/// result does not depend on `jobs`. Throws SolverFailure naming every cycle
/// that failed.
OrbitDatabase build_database(const geometry::Configuration& config, int n_max, int jobs = 1);

/// JSON-lines cache: a header line followed by one record per cycle.
void save_cache(const OrbitDatabase& db, const std::string& path);

/// Reads a cache and rebuilds all derived data from the stored angles.
/// Throws StaleCache when the configuration hash does not match and
/// MalformedInput for unreadable or incomplete files.
OrbitDatabase load_cache(const std::string& path, const geometry::Configuration& config);

}  // namespace bzeta
