// Acceptance run on the equilateral three-disk system (side 6, unit radii).
// Prints one PASS/FAIL line per criterion; `--criterion N` runs only N.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "bzeta/geometry.hpp"
#include "bzeta/orbit_database.hpp"
#include "bzeta/orbits.hpp"
#include "bzeta/stability.hpp"
#include "bzeta/thermo.hpp"
#include "bzeta/trace.hpp"
#include "bzeta/zeta.hpp"

#ifndef BZETA_CLI
#error "BZETA_CLI must name the command-line binary"
#endif

using namespace bzeta;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace tol {
constexpr double kDualOracle = 1e-9;
constexpr double kDualOracleSeconds = 60.0;
constexpr double kPeriod12 = 1e-12;
constexpr double kAnchor = 1e-10;
constexpr double kSuspension = 1e-10;
constexpr double kCrossMethod = 1e-3;
constexpr double kGap = 1e-3;
constexpr double kPressureSeconds = 300.0;
constexpr double kAbscissa = 0.02;
constexpr double kRealZero = 1e-3;
constexpr double kBracketLo = 0.2, kBracketHi = 5.0;
constexpr double kIdentity = 1e-12;
constexpr double kCountLo = 0.5, kCountHi = 2.0;
constexpr double kGaussian = 1e-8;
constexpr double kTwistedGap = 1e-6;
constexpr double kUntwisted = 1e-8;
constexpr double kWinding = 0.05;
constexpr double kConjugate = 1e-8;
constexpr double kOrderShift = 1e-4;
constexpr double kLeadingHeight = 5.0;  // leading zeros: |Im| within the smallest window
}  // namespace tol

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const geometry::Configuration& config() {
  static const auto c = geometry::equilateral_three_disk(6.0, 1.0);
  return c;
}

const OrbitDatabase& db12() {
  static const auto db = build_database(config(), 12, 8);
  return db;
}

OrbitDatabase prefix(int n) {
  std::vector<OrbitRecord> keep;
  for (const auto& r : db12().records()) {
    if (r.reflections() <= n) keep.push_back(r);
  }
  return OrbitDatabase(db12().config_hash(), 3, n, db12().min_separation(), std::move(keep));
}

const thermo::CylinderPotential& pot6() {
  static const auto p = thermo::build_potentials(db12(), 6);
  return p;
}

const thermo::Abscissas& transfer_abscissas() {
  static const auto a = thermo::abscissas(pot6());
  return a;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto db = build_database(config(), 10, 1);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  for (const auto& r : db.records()) {
    const double a = std::abs(r.stability.lambda), b = r.stability.lambda_curvature;
    worst = std::max(worst, std::abs(a - b) / a);
  }
  return {worst < tol::kDualOracle && secs < tol::kDualOracleSeconds,
          fmt("%.0f cycles, max relative gap %.2e, %.2f s", db.records().size(), worst, secs)};
}

Outcome c2() {
  const auto two = orbits::solve_orbit(config(), symbolic::Cycle::from_word(symbolic::parse_word("12"), 3));
  const auto tri = orbits::solve_orbit(config(), symbolic::Cycle::from_word(symbolic::parse_word("123"), 3));
  const auto curv = stability::unstable_curvatures(two);
  const double factor = 1.0 + two.flights[0] * curv.kappa[1];
  const double expected_factor = 5.0 + 2.0 * std::sqrt(6.0);  // 1 + 4 (1 + sqrt 6 / 2)
  const double e1 = std::abs(two.period - 8.0);
  const double e2 = std::abs(factor - expected_factor);
  const double e3 = std::abs(tri.period - 3.0 * (6.0 - std::sqrt(3.0)));
  return {e1 < tol::kPeriod12 && e2 < tol::kAnchor && e3 < tol::kAnchor,
          fmt("|T12 - 8| %.1e, |factor - (5 + 2 sqrt 6)| %.1e, |T123 - 3(6 - sqrt 3)| %.1e", e1,
              e2, e3)};
}

Outcome c3() {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const auto db = prefix(8);
  double worst = 0.0;
  int flights = 0;
  for (const auto& r : db.records()) {
    for (std::size_t i = 0; i < r.curvature.kappa.size(); ++i) {
      const double k = r.curvature.kappa[i], f = r.orbit.flights[i];
      const double q = 2.0 * GK::integrate([k](double y) { return stability::suspension_density(k, y); },
                                           0.0, f, 10, 1e-14);
      worst = std::max(worst, std::abs(q + std::log1p(f * k)));
      ++flights;
    }
  }
  return {worst < tol::kSuspension, fmt("%.0f flights, max deviation %.2e", flights, worst)};
}

Outcome c4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tr = thermo::abscissas(thermo::build_potentials(db12(), 6));
  const auto po = thermo::abscissas(db12(), 10);
  const double secs = seconds_since(t0);
  const double dh = std::abs(tr.h - po.h), da = std::abs(tr.a1 - po.a1), db = std::abs(tr.b1 - po.b1);
  const bool order = tr.b1 < tr.a1 && tr.a1 < tr.h && tr.h - tr.a1 > tol::kGap && tr.a1 - tr.b1 > tol::kGap;
  return {std::max({dh, da, db}) < tol::kCrossMethod && order && secs < tol::kPressureSeconds,
          fmt("h %.6f a1 %.6f b1 %.6f, ", tr.h, tr.a1, tr.b1) +
              fmt("method gaps %.1e %.1e %.1e, %.2f s", dh, da, db, secs)};
}

Outcome c5() {
  const auto& a = transfer_abscissas();
  const auto half = zeta::abscissa_estimate(db12(), zeta::Weight::half);
  const auto full = zeta::abscissa_estimate(db12(), zeta::Weight::full);
  const auto det = zeta::build_determinant(db12(), 12, 6);
  double lo = a.a1 - 0.05, hi = a.a1 + 0.05;
  const double dlo = det.value(lo).real(), dhi = det.value(hi).real();
  bool bracketed = dlo * dhi < 0.0;
  for (int i = 0; bracketed && i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((det.value(mid).real() < 0.0) == (dlo < 0.0) ? lo : hi) = mid;
  }
  const double zero = 0.5 * (lo + hi);
  const double e1 = std::abs(half.s - a.a1), e2 = std::abs(full.s - a.b1), e3 = std::abs(zero - a.a1);
  return {bracketed && e1 < tol::kAbscissa && e2 < tol::kAbscissa && e3 < tol::kRealZero,
          fmt("half %.5f vs a1 (%.1e), full %.5f vs b1 ", half.s, e1, full.s) +
              fmt("(%.1e), real zero %.8f (%.1e)", e2, zero, e3)};
}

Outcome c6() {
  const auto db = prefix(10);
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : db.records()) {
    for (int k = 1; k <= 5; ++k) {
      const double ratio = r.det_id_minus(k) / std::pow(std::abs(r.stability.lambda), k);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {lo >= tol::kBracketLo && hi <= tol::kBracketHi, fmt("ratio range [%.6f, %.6f]", lo, hi)};
}

Outcome c7() {
  const auto& db = db12();
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> re(0.2, 2.0), im(-40.0, 40.0);
  const double cutoff = 45.0;
  double id = 0.0, filt = 0.0;
  for (int i = 0; i < 20; ++i) {
    const cplx s(re(rng), im(rng));
    const cplx e1 = zeta::eta_direct(db, s, 1, false, cutoff);
    const cplx e2 = zeta::eta_direct(db, s, 2, false, cutoff);
    const cplx ed = zeta::eta_direct(db, s, 1, true, cutoff);
    id = std::max(id, std::abs(ed - (e2 - e1)) / std::max(1.0, std::abs(e1)));
    for (int q = 2; q <= 6; ++q) {
      const cplx a = zeta::eta_direct(db, s, q, false, cutoff, false);
      const cplx b = zeta::eta_direct(db, s, q, false, cutoff, true);
      filt = std::max(filt, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  }
  bool matrices = true;
  for (int q = 1; q <= 6; ++q) {
    const auto a = zeta::reflection_matrix(q);
    const auto p = zeta::matrix_power(a, q);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) matrices = matrices && p[i][j] == (i == j ? 1 : 0);
    }
    for (int j = 1; j < q; ++j) {
      const auto pj = zeta::matrix_power(a, j);
      long long tr = 0;
      for (int i = 0; i < q; ++i) tr += pj[i][i];
      matrices = matrices && tr == 0;
    }
  }
  return {id < tol::kIdentity && filt < tol::kIdentity && matrices,
          fmt("identity %.1e, roots of unity %.1e, ", id, filt) +
              (matrices ? "A(q) checks hold" : "A(q) checks fail")};
}

Outcome c8() {
  const auto rep = zeta::counting_check(db12(), transfer_abscissas().h);
  return {rep.ratio_min >= tol::kCountLo && rep.ratio_max <= tol::kCountHi,
          fmt("top decade [%.2f, %.2f]: ratio in [%.4f, %.4f], ", rep.top_min, rep.x_max,
              rep.ratio_min, rep.ratio_max) +
              fmt("trend %.4f per unit length, ", rep.trend_slope) +
              (rep.monotone ? "monotone" : "not monotone")};
}

Outcome c9() {
  const auto rho = trace::make_bump();
  const auto q = trace::default_quadrature(0.1);
  const auto g = trace::gaussian_weight(db12(), rho, 12.8, 0.1, q.xi_max, q.step);
  const double rel = std::abs(g.direct - g.quadrature) / g.direct;
  const std::vector<std::pair<double, double>> grid{{8.0, 0.1},  {12.8, 0.5}, {16.6, 0.2},
                                                    {20.5, 0.9}, {24.0, 0.1}, {28.7, 0.5},
                                                    {32.0, 0.3}, {36.4, 0.7}, {40.0, 0.1},
                                                    {44.5, 0.5}};
  int held = 0;
  double tightest = INFINITY;
  for (const auto& [t, sigma] : grid) {
    const auto qs = trace::default_quadrature(sigma);
    const auto gs = trace::gaussian_weight(db12(), rho, t, sigma, qs.xi_max, qs.step);
    if (gs.direct >= gs.lower_bound && gs.quadrature >= gs.lower_bound) ++held;
    tightest = std::min(tightest, gs.direct / gs.lower_bound);
  }
  return {rel < tol::kGaussian && held == static_cast<int>(grid.size()),
          fmt("G(12.8, 0.1) = %.10g, relative gap %.1e, lower bound holds at %.0f/10 points ",
              g.direct, rel, held) +
              fmt("(min G / bound %.3f)", tightest)};
}

Outcome c10() {
  const double b1 = thermo::solve_abscissa(pot6(), 1.0).s;
  const auto rep = thermo::twisted_spectral_test(pot6(), b1);
  const bool untwisted = std::abs(rep.lambda_untwisted - 1.0) < tol::kUntwisted;
  const bool twisted = rep.twisted_modulus < 1.0 - tol::kTwistedGap;
  return {untwisted && twisted,
          fmt("untwisted %.12f, twisted modulus %.12f (the twisted matrix is -M), ",
              rep.lambda_untwisted, rep.twisted_modulus) +
              fmt("no twisted eigenvalue at 1: min |mu - 1| = %.6f", rep.twisted_distance_to_one)};
}

Outcome c11() {
  const auto d12 = zeta::build_determinant(db12(), 12, 6);
  const auto d10 = zeta::build_determinant(db12(), 10, 6);
  zeta::PoleSearch search;
  search.jobs = 8;
  std::vector<std::size_t> counts;
  std::vector<zeta::Pole> poles;
  for (double height : {5.0, 10.0, 20.0}) {
    search.ny = static_cast<int>(2 * height + 1);
    auto p = zeta::find_poles(d12, {-0.2, 0.3, -height, height}, search);
    int n = 0;
    for (const auto& z : p) n += z.multiplicity;
    counts.push_back(n);
    if (height == 10.0) poles = std::move(p);
  }
  bool integer = true, conjugate = true;
  double shift = 0.0, shift_all = 0.0;
  int leading = 0;
  const auto f10 = zeta::as_function(d10);
  for (const auto& z : poles) {
    integer = integer && z.multiplicity >= 1 && std::abs(z.winding - z.multiplicity) < tol::kWinding;
    double nearest = INFINITY;
    for (const auto& w : poles) nearest = std::min(nearest, std::abs(w.location - std::conj(z.location)));
    conjugate = conjugate && nearest < tol::kConjugate;
    cplx w = z.location;
    for (int i = 0; i < 60; ++i) {
      const auto [v, dv] = f10(w);
      const cplx step = v / dv;
      w -= step;
      if (std::abs(step) < 1e-15) break;
    }
    shift_all = std::max(shift_all, std::abs(w - z.location));
    if (std::abs(z.location.imag()) <= tol::kLeadingHeight) {
      shift = std::max(shift, std::abs(w - z.location));
      ++leading;
    }
  }
  const bool growing = counts[0] <= counts[1] && counts[1] <= counts[2];
  return {integer && conjugate && shift < tol::kOrderShift && growing && leading > 0,
          fmt("%.0f zeros in |Im| <= 10, N 12 -> 10 shift %.1e over %.0f leading zeros ",
              poles.size(), shift, leading) +
              fmt("(%.1e over all), counts %.0f", shift_all, counts[0]) +
              fmt(" / %.0f / %.0f for |Im| <= 5 / 10 / 20", counts[1], counts[2]) +
              (integer ? "" : ", non-integer winding") + (conjugate ? "" : ", asymmetric")};
}

// Runs every subcommand in dir with the given job count; false on a nonzero exit.
bool run_pipeline(const fs::path& dir, int jobs, std::string& why) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "eq6.json") << geometry::config_to_json(config()).dump() << '\n';
  const std::string j = " --jobs " + std::to_string(jobs);
  const std::vector<std::string> cmds{"validate",  "orbits" + j, "abscissas" + j,
                                      "zeta" + j,  "poles" + j,  "counting" + j,
                                      "trace --experimental-trace-compare" + j};
  for (const auto& c : cmds) {
    const std::string line = "cd '" + dir.string() + "' && " + BZETA_CLI + " " + c +
                             " --config eq6.json --out out > log.txt 2>&1";
    const int status = std::system(line.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      why = c + " failed with --jobs " + std::to_string(jobs);
      return false;
    }
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12() {
  const auto base = fs::temp_directory_path() / ("bzeta_acceptance_" + std::to_string(::getpid()));
  std::string why;
  if (!run_pipeline(base / "jobs1", 1, why) || !run_pipeline(base / "jobs8", 8, why)) {
    fs::remove_all(base);
    return {false, why};
  }
  std::set<std::string> names1, names8;
  for (const auto& e : fs::directory_iterator(base / "jobs1" / "out")) names1.insert(e.path().filename());
  for (const auto& e : fs::directory_iterator(base / "jobs8" / "out")) names8.insert(e.path().filename());
  int identical = 0, manifests = 0;
  std::string differing;
  for (const auto& n : names1) {
    const auto a = slurp(base / "jobs1" / "out" / n), b = slurp(base / "jobs8" / "out" / n);
    if (n.rfind("run_manifest_", 0) == 0) {
      // The manifest records the job count and the wall-clock time by design.
      auto ja = nlohmann::json::parse(a), jb = nlohmann::json::parse(b);
      for (auto* m : {&ja, &jb}) {
        m->erase("timestamp");
        (*m)["parameters"].erase("jobs");
      }
      if (ja == jb) ++manifests;
      else differing += " " + n;
    } else if (a == b) {
      ++identical;
    } else {
      differing += " " + n;
    }
  }
  fs::remove_all(base);
  const bool same_set = names1 == names8;
  return {same_set && differing.empty(),
          fmt("%.0f output files byte-identical, %.0f manifests equal apart from jobs and timestamp",
              identical, manifests) +
              (same_set ? "" : ", file sets differ") +
              (differing.empty() ? "" : ", differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4,  c5,  c6,
                                                       c7, c8, c9, c10, c11, c12};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2zu %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
