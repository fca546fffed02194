#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "bzeta/geometry.hpp"
#include "bzeta/orbit_database.hpp"

namespace fixture {

inline const bzeta::geometry::Configuration& eq6() {
  static const auto config = bzeta::geometry::equilateral_three_disk(6.0, 1.0);
  return config;
}

/// Equilateral side 6, unit disks, all primitive cycles up to n_max.
inline const bzeta::OrbitDatabase& db(int n_max = 12) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<bzeta::OrbitDatabase>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n_max];
  if (!slot) slot = std::make_unique<bzeta::OrbitDatabase>(bzeta::build_database(eq6(), n_max, 4));
  return *slot;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fixture
