#include "bzeta/orbit_database.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

namespace bzeta {

namespace {

constexpr const char* kCacheFormat = "orbit-cache/2";

OrbitRecord complete_record(orbits::PeriodicOrbit orbit) {
  OrbitRecord rec;
  rec.orbit = std::move(orbit);
  rec.curvature = stability::unstable_curvatures(rec.orbit);
  rec.stability = stability::weights(rec.orbit, rec.curvature, kDefaultRepetitionTable);
  return rec;
}

}  // namespace

OrbitDatabase::OrbitDatabase(std::string config_hash, int alphabet, int n_max,
                             double min_separation, std::vector<OrbitRecord> records)
    : hash_(std::move(config_hash)), r_(alphabet), n_max_(n_max), d0_(min_separation),
      records_(std::move(records)) {
  std::stable_sort(records_.begin(), records_.end(),
                   [](const OrbitRecord& a, const OrbitRecord& b) { return a.cycle() < b.cycle(); });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto [it, inserted] = index_.emplace(records_[i].cycle().str(), i);
    if (!inserted) throw ContractViolation("duplicate cycle in orbit database: " + it->first);
  }
}

const OrbitRecord* OrbitDatabase::find(const symbolic::Word& canonical) const {
  return find(symbolic::to_string(canonical));
}

const OrbitRecord* OrbitDatabase::find(const std::string& word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? nullptr : &records_[it->second];
}

OrbitDatabase build_database(const geometry::Configuration& config, int n_max, int jobs) {
  const int r = config.size();
  const auto by_length = symbolic::enumerate_cycles(r, n_max);
  std::vector<symbolic::Cycle> cycles;
  for (const auto& group : by_length) cycles.insert(cycles.end(), group.begin(), group.end());

  std::vector<std::optional<OrbitRecord>> slots(cycles.size());
  std::vector<std::string> failures(cycles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cycles.size(); i = next++) {
      try {
        slots[i] = complete_record(orbits::solve_orbit(config, cycles[i]));
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cycles.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string failed;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (!failures[i].empty()) failed += (failed.empty() ? "" : ", ") + cycles[i].str();
  }
  if (!failed.empty()) throw SolverFailure("orbit solving failed for: " + failed, 0.0);

  std::vector<OrbitRecord> records;
  records.reserve(cycles.size());
  for (auto& s : slots) records.push_back(std::move(*s));
  return OrbitDatabase(geometry::config_hash(config), r, n_max, geometry::min_separation(config),
                       std::move(records));
}

void save_cache(const OrbitDatabase& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedInput("cannot write orbit cache: " + path);
  nlohmann::json header = {{"kind", "header"},
                           {"format", kCacheFormat},
                           {"config_hash", db.config_hash()},
                           {"alphabet", db.alphabet()},
                           {"n_max", db.n_max()},
                           {"solver_version", orbits::kSolverVersion}};
  out << header.dump() << '\n';
  for (const auto& rec : db.records()) {
    const auto& o = rec.orbit;
    nlohmann::json j = {{"word", o.cycle.str()},
                        {"angles", o.angles},
                        {"T", o.period},
                        {"flights", o.flights},
                        {"cos_incidence", o.cos_incidence},
                        {"residual", o.residual},
                        {"solver_version", orbits::kSolverVersion},
                        {"kappa", rec.curvature.kappa},
                        {"lambda", rec.stability.lambda},
                        {"det1p", rec.stability.det1p}};
    out << j.dump() << '\n';
  }
}

OrbitDatabase load_cache(const std::string& path, const geometry::Configuration& config) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open orbit cache: " + path);
  std::string line;
  if (!std::getline(in, line)) throw MalformedInput("empty orbit cache: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad orbit cache header: ") + e.what());
  }
  if (header.value("format", "") != kCacheFormat ||
      header.value("solver_version", 0) != orbits::kSolverVersion) {
    throw StaleCache("orbit cache was written by a different solver version");
  }
  const std::string hash = geometry::config_hash(config);
  if (header.value("config_hash", "") != hash) {
    throw StaleCache("orbit cache " + path + " belongs to configuration " +
                     header.value("config_hash", "?") + ", not " + hash);
  }
  const int n_max = header.at("n_max").get<int>();
  const int r = config.size();

  std::vector<OrbitRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto cycle =
          symbolic::Cycle::from_word(symbolic::parse_word(j.at("word").get<std::string>()), r);
      records.push_back(complete_record(
          orbits::orbit_from_angles(config, cycle, j.at("angles").get<std::vector<double>>())));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedInput(std::string("bad orbit cache record: ") + e.what());
    }
  }
  std::int64_t expected = 0;
  for (int n = 2; n <= n_max; ++n) expected += symbolic::count_primitive_classes(r, n);
  if (static_cast<std::int64_t>(records.size()) != expected) {
    throw MalformedInput("orbit cache is incomplete: " + path);
  }
  return OrbitDatabase(hash, r, n_max, geometry::min_separation(config), std::move(records));
}

}  // namespace bzeta
