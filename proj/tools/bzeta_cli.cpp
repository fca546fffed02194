// bzeta: command-line front end.
//
// Exit codes: 0 ok, 1 usage / malformed input / stale cache, 2 domain
// failure (geometry, incomplete data), 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bzeta/errors.hpp"
#include "bzeta/geometry.hpp"
#include "bzeta/orbit_database.hpp"
#include "bzeta/thermo.hpp"
#include "bzeta/trace.hpp"
#include "bzeta/zeta.hpp"

namespace fs = std::filesystem;
using namespace bzeta;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kDomain = 2, kNumerical = 3 };

struct Common {
  std::string config;
  std::string cache;
  std::optional<int> nmax;
  int jobs = 1;
  std::string out = ".";
  bool experimental = false;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw MalformedInput("cannot write " + path.string());
    row_strings(header);
  }
  template <typename... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    row_strings(v);
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long long x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

// Output directory plus the manifest written at the end of every run.
class Run {
 public:
  Run(const Common& c, std::string subcommand) : common_(c), sub_(std::move(subcommand)) {
    fs::create_directories(c.out);
  }
  fs::path file(const std::string& name) {
    files_.push_back(name);
    return fs::path(common_.out) / name;
  }
  void record_file(const fs::path& path) { files_.push_back(path.string()); }
  nlohmann::json& parameters() { return params_; }
  void finish(const std::string& config_hash) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    params_["jobs"] = common_.jobs;
    if (common_.nmax) params_["nmax"] = *common_.nmax;
    nlohmann::json m = {{"config_hash", config_hash}, {"subcommand", sub_},
                        {"parameters", params_},      {"tool_version", kToolVersion},
                        {"timestamp", stamp},         {"outputs", files_}};
    std::ofstream out(fs::path(common_.out) / ("run_manifest_" + sub_ + ".json"), std::ios::binary);
    out << m.dump(2) << '\n';
  }

 private:
  const Common& common_;
  std::string sub_;
  nlohmann::json params_ = nlohmann::json::object();
  std::vector<std::string> files_;
};

std::string cache_path(const Common& c) {
  return c.cache.empty() ? (fs::path(c.out) / "orbits.jsonl").string() : c.cache;
}

geometry::Configuration load_valid_config(const Common& c) {
  auto config = geometry::load_config(c.config);
  const auto report = geometry::validate(config);
  if (!report.passed) throw GeometryError("configuration rejected: " + report.first_violation());
  return config;
}

// Records up to n reflections.
OrbitDatabase truncated(const OrbitDatabase& db, int n) {
  if (n > db.n_max()) {
    throw IncompleteData("--nmax " + std::to_string(n) + " exceeds the cache's n_max " +
                         std::to_string(db.n_max()) + "; rerun `orbits` with a larger --nmax");
  }
  if (n == db.n_max()) return db;
  std::vector<OrbitRecord> keep;
  for (const auto& rec : db.records()) {
    if (rec.reflections() <= n) keep.push_back(rec);
  }
  return OrbitDatabase(db.config_hash(), db.alphabet(), n, db.min_separation(), std::move(keep));
}

OrbitDatabase load_database(const Common& c, const geometry::Configuration& config) {
  const std::string path = cache_path(c);
  if (!fs::exists(path)) {
    throw MalformedInput("orbit cache " + path + " not found; run `bzeta orbits` first");
  }
  try {
    auto db = load_cache(path, config);
    return c.nmax ? truncated(db, *c.nmax) : db;
  } catch (const StaleCache& e) {
    throw StaleCache(std::string(e.what()) + "; rerun `bzeta orbits --config " + c.config +
                     "` with a fresh --cache path");
  }
}

double usable_cutoff(const OrbitDatabase& db) {
  return std::nextafter(db.complete_period(), 0.0);
}

int cmd_validate(const Common& c, Run& run) {
  const auto config = geometry::load_config(c.config);
  const auto report = geometry::validate(config);
  Csv csv(run.file("validation.csv"), {"constraint", "i", "j", "k", "clearance"});
  for (const auto& v : report.violations) {
    csv.row(v.describe(), v.i + 1, v.j + 1, v.k + 1, v.clearance);
  }
  run.finish(geometry::config_hash(config));
  if (report.passed) {
    std::printf("PASS %zu obstacles, d0 = %s\n", config.disks.size(),
                fmt(geometry::min_separation(config)).c_str());
    return kOk;
  }
  std::printf("FAIL %s\n", report.first_violation().c_str());
  return kDomain;
}

int cmd_orbits(const Common& c, Run& run) {
  const auto config = load_valid_config(c);
  const int nmax = c.nmax.value_or(12);
  const std::string path = cache_path(c);
  std::optional<OrbitDatabase> db;
  if (fs::exists(path)) {
    auto cached = load_cache(path, config);  // StaleCache propagates
    if (cached.n_max() >= nmax) {
      std::printf("cache hit: %s (n_max %d)\n", path.c_str(), cached.n_max());
      db = truncated(cached, nmax);
    }
  }
  if (!db) {
    db = build_database(config, nmax, c.jobs);
    save_cache(*db, path);
    std::printf("solved %zu cycles, cache written to %s\n", db->records().size(), path.c_str());
  }
  run.record_file(fs::path(path));
  Csv csv(run.file("orbits.csv"),
          {"word", "reflections", "period", "lambda", "det_id_minus", "residual"});
  std::map<int, int> per_length;
  double rmin = INFINITY, rmax = 0.0;
  for (const auto& rec : db->records()) {
    csv.row(rec.cycle().str(), rec.reflections(), rec.period(), rec.stability.lambda,
            rec.det_id_minus(1), rec.orbit.residual);
    ++per_length[rec.reflections()];
    rmin = std::min(rmin, rec.orbit.residual);
    rmax = std::max(rmax, rec.orbit.residual);
  }
  std::string counts;
  for (const auto& [n, k] : per_length) counts += " " + std::to_string(n) + ":" + std::to_string(k);
  std::printf("counts per length%s; residual min %s max %s\n", counts.c_str(), fmt(rmin).c_str(),
              fmt(rmax).c_str());
  run.parameters()["nmax"] = nmax;
  run.finish(db->config_hash());
  return kOk;
}

int cmd_abscissas(const Common& c, Run& run, int memory, int period) {
  const auto config = load_valid_config(c);
  const auto db = load_database(c, config);
  const auto pot = thermo::build_potentials(db, memory);
  const auto tr = thermo::abscissas(pot);
  const auto po = thermo::abscissas(db, period);

  Csv scan(run.file("pressure_scan.csv"), {"beta", "k_or_n", "method", "s", "P"});
  for (double beta : {0.0, 0.5, 1.0}) {
    for (int i = 0; i <= 40; ++i) {
      const double s = -1.0 + 0.05 * i;
      scan.row(beta, memory, "transfer", s, thermo::pressure(pot, s, beta));
    }
    for (int i = 0; i <= 40; ++i) {
      const double s = -1.0 + 0.05 * i;
      scan.row(beta, period, "periodic", s, thermo::pressure_periodic(db, s, beta, period));
    }
  }
  nlohmann::json j = {
      {"h", tr.h},
      {"a1", tr.a1},
      {"b1", tr.b1},
      {"gaps", {{"h_minus_a1", tr.h - tr.a1}, {"a1_minus_b1", tr.a1 - tr.b1}}},
      {"method_agreement",
       {{"transfer_memory", memory},
        {"periodic_n", period},
        {"periodic", {{"h", po.h}, {"a1", po.a1}, {"b1", po.b1}}},
        {"max_difference",
         std::max({std::abs(tr.h - po.h), std::abs(tr.a1 - po.a1), std::abs(tr.b1 - po.b1)})}}}};
  std::ofstream(run.file("abscissas.json"), std::ios::binary) << j.dump(2) << '\n';
  std::printf("h = %s  a1 = %s  b1 = %s\n", fmt(tr.h).c_str(), fmt(tr.a1).c_str(),
              fmt(tr.b1).c_str());
  run.parameters()["memory"] = memory;
  run.parameters()["period"] = period;
  run.finish(db.config_hash());
  return kOk;
}

int cmd_zeta(const Common& c, Run& run, int memory) {
  using zeta::Weight;
  const auto config = load_valid_config(c);
  const auto db = load_database(c, config);
  const auto th = thermo::abscissas(thermo::build_potentials(db, memory));

  struct Series {
    const char* name;
    Weight weight;
    int q;
    bool sign;
    double s;
    double thermo_value;
  };
  const std::vector<Series> series = {
      {"none", Weight::none, 1, false, th.h, th.h},
      {"half", Weight::half, 1, false, th.a1, th.a1},
      {"full", Weight::full, 1, false, th.b1, th.b1},
      {"unstable", Weight::unstable, 1, false, th.b1, th.b1},
      {"half_q2", Weight::half, 2, false, th.a1, th.a1},
      {"dirichlet_half", Weight::half, 1, true, th.a1, th.a1},
  };
  Csv shells(run.file("zeta_shells.csv"), {"series", "s", "n", "shell", "partial_sum"});
  for (const auto& se : series) {
    const auto v = zeta::shell_sums(db, se.s, se.weight, se.q, se.sign);
    double partial = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
      partial += v[n];
      shells.row(se.name, se.s, static_cast<int>(n + 1), v[n], partial);
    }
  }
  Csv est(run.file("zeta_abscissas.csv"),
          {"series", "q", "estimate", "error", "thermo", "difference", "wide"});
  for (const auto& se : series) {
    if (se.sign) continue;
    const auto a = zeta::abscissa_estimate(db, se.weight, se.q);
    est.row(se.name, se.q, a.s, a.error, se.thermo_value, a.s - se.thermo_value, a.wide);
  }
  const auto signed_rep = zeta::signed_series_test(db, th.b1);
  Csv sg(run.file("zeta_signed.csv"), {"pair", "grouped_increment"});
  for (std::size_t i = 0; i < signed_rep.grouped_increments.size(); ++i) {
    sg.row(static_cast<int>(i + 1), signed_rep.grouped_increments[i]);
  }
  std::printf("b1 = %s, signed series grouped decay ratio %s\n", fmt(th.b1).c_str(),
              fmt(signed_rep.decay_ratio).c_str());
  run.parameters()["memory"] = memory;
  run.finish(db.config_hash());
  return kOk;
}

struct PoleArgs {
  std::optional<int> order;
  int k_max = 6;
  double re_min = -0.2, re_max = 0.3, im_max = 10.0;
  int nx = 8, ny = 21;
};

int cmd_poles(const Common& c, Run& run, const PoleArgs& a) {
  const auto config = load_valid_config(c);
  const auto db = load_database(c, config);
  const int order = a.order.value_or(db.n_max());
  const auto det = zeta::build_determinant(db, order, a.k_max);
  zeta::PoleSearch search;
  search.nx = a.nx;
  search.ny = a.ny;
  search.jobs = c.jobs;
  const auto poles = zeta::find_poles(det, {a.re_min, a.re_max, -a.im_max, a.im_max}, search);
  Csv csv(run.file("poles.csv"), {"re", "im", "multiplicity", "winding", "trust_margin"});
  for (const auto& p : poles) {
    csv.row(p.location.real(), p.location.imag(), p.multiplicity, p.winding, p.trust_margin);
  }
  std::printf("%zu zeros in [%s, %s] x [%s, %s], trust floor %s\n", poles.size(),
              fmt(a.re_min).c_str(), fmt(a.re_max).c_str(), fmt(-a.im_max).c_str(),
              fmt(a.im_max).c_str(), fmt(det.trust_floor()).c_str());
  auto& p = run.parameters();
  p["order"] = order;
  p["k_max"] = a.k_max;
  p["rect"] = {a.re_min, a.re_max, -a.im_max, a.im_max};
  p["nx"] = a.nx;
  p["ny"] = a.ny;
  run.finish(db.config_hash());
  return kOk;
}

int cmd_counting(const Common& c, Run& run, int memory, int points) {
  const auto config = load_valid_config(c);
  const auto db = load_database(c, config);
  const double h = thermo::solve_abscissa(thermo::build_potentials(db, memory), 0.0).s;
  const auto rep = zeta::counting_check(db, h, points);
  Csv csv(run.file("counting.csv"), {"x", "count", "prediction", "ratio"});
  for (const auto& r : rep.rows) csv.row(r.x, r.count, r.prediction, r.ratio);
  nlohmann::json j = {{"h", h},
                      {"x_max", rep.x_max},
                      {"top_min", rep.top_min},
                      {"ratio_min", rep.ratio_min},
                      {"ratio_max", rep.ratio_max},
                      {"trend_slope", rep.trend_slope},
                      {"monotone", rep.monotone}};
  std::ofstream(run.file("counting_summary.json"), std::ios::binary) << j.dump(2) << '\n';
  std::printf("top decade ratio in [%s, %s], trend %s per unit length\n",
              fmt(rep.ratio_min).c_str(), fmt(rep.ratio_max).c_str(),
              fmt(rep.trend_slope).c_str());
  run.parameters()["memory"] = memory;
  run.parameters()["points"] = points;
  run.finish(db.config_hash());
  return kOk;
}

struct TraceArgs {
  double beta = 0.05;
  double alpha0 = 0.5;
  double eps = 0.1;
  double t_max = 40.0;
  std::string gamma0 = "12";
  int memory = 6;
};

int cmd_trace(const Common& c, Run& run, const TraceArgs& a) {
  const auto config = load_valid_config(c);
  const auto db = load_database(c, config);
  const auto rho = trace::make_bump();
  const double cutoff = usable_cutoff(db);
  const auto fd = trace::dirichlet_measure(db, cutoff);

  const OrbitRecord* g0 = db.find(a.gamma0);
  if (g0 == nullptr) throw ContractViolation("cycle " + a.gamma0 + " is not in the orbit cache");
  int j_max = 0;
  while ((j_max + 1) * g0->period() + 1.0 <= cutoff) ++j_max;
  const int q = g0->reflections();
  const auto eq = trace::eta_measure(db, q, cutoff);

  Csv ik(run.file("ikawa.csv"),
         {"measure", "ell", "m", "value", "bound", "pass", "atoms"});
  auto emit = [&](const char* name, const trace::IkawaScan& scan) {
    for (const auto& r : scan.rows) ik.row(name, r.ell, r.m, r.value, r.bound, r.pass, r.atoms);
  };
  std::vector<double> grid;
  for (double ell = std::ceil(db.min_separation()); ell + 1.0 <= cutoff; ell += 0.5) {
    grid.push_back(ell);
  }
  emit("dirichlet", trace::ikawa_scan(fd, rho, a.beta, a.alpha0, grid));
  const auto seq_d = trace::ikawa_sequence(fd, rho, g0->period(), a.beta, a.alpha0, j_max);
  emit("dirichlet_sequence", seq_d);
  const auto seq_q = trace::ikawa_sequence(eq, rho, g0->period(), a.beta, a.alpha0, j_max);
  emit("eta_q_sequence", seq_q);
  Csv fit(run.file("ikawa_fit.csv"), {"measure", "gamma0", "q", "c", "c0"});
  fit.row("dirichlet_sequence", a.gamma0, q, seq_d.c, seq_d.c0);
  fit.row("eta_q_sequence", a.gamma0, q, seq_q.c, seq_q.c0);

  Csv gw(run.file("gaussian.csv"), {"t", "sigma", "direct", "quadrature", "error_estimate",
                                     "lower_bound", "atoms"});
  for (double t : {8.0, 12.8, 16.6, 20.5, 24.5, 28.5, 32.5, 36.5, 40.5, 44.5}) {
    if (t + 1.0 > cutoff) continue;
    for (double sigma : {0.1, 0.5}) {
      const auto grid_q = trace::default_quadrature(sigma);
      const auto g = trace::gaussian_weight(db, rho, t, sigma, grid_q.xi_max, grid_q.step);
      gw.row(g.t, g.sigma, g.direct, g.quadrature, g.error_estimate, g.lower_bound, g.atoms);
    }
  }

  const double b1 = thermo::solve_abscissa(thermo::build_potentials(db, a.memory), 1.0).s;
  const auto ls = trace::large_shell_search(db, b1, a.eps, a.t_max);
  Csv sh(run.file("shells.csv"),
         {"t", "sum", "bound", "rays", "distinct_lengths", "qualifies"});
  for (const auto& s : ls.shells) {
    sh.row(s.t, s.sum, s.bound, s.rays, s.distinct_lengths, s.qualifies);
  }
  std::printf("large shells (case %d): %s, density %s\n", ls.which_case, ls.diagnostics.c_str(),
              fmt(ls.density).c_str());

  if (c.experimental) {
    const auto det = zeta::build_determinant(db, db.n_max());
    zeta::PoleSearch search;
    search.ny = 21;
    search.jobs = c.jobs;
    const double re_min = std::ceil(det.trust_floor() * 64.0) / 64.0 + 1.0 / 64.0;
    const auto poles = zeta::find_poles(det, {re_min, 0.3, -10.0, 10.0}, search);
    const auto e1 = trace::eta_measure(db, 1, cutoff);
    std::vector<double> ells;
    for (double ell = 8.0; ell + 1.0 <= cutoff; ell += 2.0) ells.push_back(ell);
    Csv tc(run.file("trace_compare.csv"),
           {"ell", "m", "orbit_side", "resonance_re", "resonance_im", "poles"});
    for (const auto& r : trace::trace_compare(e1, rho, poles, ells, 1.0)) {
      tc.row(r.ell, 1.0, r.orbit_side, r.resonance_side.real(), r.resonance_side.imag(), r.poles);
    }
  }
  auto& p = run.parameters();
  p["beta"] = a.beta;
  p["alpha0"] = a.alpha0;
  p["eps"] = a.eps;
  p["t_max"] = a.t_max;
  p["gamma0"] = a.gamma0;
  p["memory"] = a.memory;
  p["experimental_trace_compare"] = c.experimental;
  run.finish(db.config_hash());
  return kOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const MalformedInput*>(&e) || dynamic_cast<const StaleCache*>(&e) ||
      dynamic_cast<const ContractViolation*>(&e)) {
    return kUsage;
  }
  if (dynamic_cast<const GeometryError*>(&e) || dynamic_cast<const IncompleteData*>(&e)) {
    return kDomain;
  }
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const SolverFailure*>(&e)) {
    return kNumerical;
  }
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic-orbit zeta functions of open billiards"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_cache) {
    sub->add_option("--config", common.config, "configuration JSON")->required();
    if (needs_cache) {
      sub->add_option("--cache", common.cache, "orbit cache (default OUT/orbits.jsonl)");
      sub->add_option("--nmax", common.nmax, "maximal reflection count");
      sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out", common.out, "output directory");
  };

  auto* validate = app.add_subcommand("validate", "check disjointness and non-eclipse");
  add_common(validate, false);

  auto* orbits = app.add_subcommand("orbits", "solve primitive periodic rays into the cache");
  add_common(orbits, true);

  int memory = 6, period = 10, points = 200;
  auto* absc = app.add_subcommand("abscissas", "pressure roots h, a1, b1");
  add_common(absc, true);
  absc->add_option("--memory", memory, "cylinder memory k");
  absc->add_option("--period", period, "period n of the periodic-orbit estimator");

  auto* zeta_cmd = app.add_subcommand("zeta", "shell sums and abscissa estimates");
  add_common(zeta_cmd, true);
  zeta_cmd->add_option("--memory", memory, "cylinder memory k for thermo values");

  PoleArgs pa;
  auto* poles = app.add_subcommand("poles", "zeros of the cycle-expanded determinant");
  add_common(poles, true);
  poles->add_option("--order", pa.order, "truncation order N (default n_max)");
  poles->add_option("--kmax", pa.k_max, "transverse index cutoff");
  poles->add_option("--re-min", pa.re_min);
  poles->add_option("--re-max", pa.re_max);
  poles->add_option("--im-max", pa.im_max);
  poles->add_option("--nx", pa.nx);
  poles->add_option("--ny", pa.ny);

  auto* counting = app.add_subcommand("counting", "length counting function against e^{hx}/hx");
  add_common(counting, true);
  counting->add_option("--memory", memory, "cylinder memory k for h");
  counting->add_option("--points", points, "grid size");

  TraceArgs ta;
  auto* trace_cmd = app.add_subcommand("trace", "pairings, Gaussian weight, shell search");
  add_common(trace_cmd, true);
  trace_cmd->add_option("--beta", ta.beta);
  trace_cmd->add_option("--alpha0", ta.alpha0);
  trace_cmd->add_option("--eps", ta.eps);
  trace_cmd->add_option("--tmax", ta.t_max);
  trace_cmd->add_option("--gamma0", ta.gamma0, "cycle for the special sequence");
  trace_cmd->add_flag("--experimental-trace-compare", common.experimental,
                      "compare the orbit side with determinant zeros");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      Run run(common, "validate");
      return cmd_validate(common, run);
    }
    if (*orbits) {
      Run run(common, "orbits");
      return cmd_orbits(common, run);
    }
    if (*absc) {
      Run run(common, "abscissas");
      return cmd_abscissas(common, run, memory, period);
    }
    if (*zeta_cmd) {
      Run run(common, "zeta");
      return cmd_zeta(common, run, memory);
    }
    if (*poles) {
      Run run(common, "poles");
      return cmd_poles(common, run, pa);
    }
    if (*counting) {
      Run run(common, "counting");
      return cmd_counting(common, run, memory, points);
    }
    if (*trace_cmd) {
      Run run(common, "trace");
      return cmd_trace(common, run, ta);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return kUsage;
}
