#include "bzeta/zeta.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include "bzeta/errors.hpp"

namespace bzeta::zeta {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCountSlack = 1e-9;

void check_cutoff(const OrbitDatabase& db, double cutoff) {
  if (!(cutoff < db.complete_period())) {
    throw IncompleteData("cutoff " + std::to_string(cutoff) +
                         " reaches rays the orbit database may not contain (complete below " +
                         std::to_string(db.complete_period()) + ")");
  }
}

double ray_weight(const OrbitRecord& rec, int r, Weight w) {
  switch (w) {
    case Weight::none:
      return 1.0;
    case Weight::half:
      return 1.0 / std::sqrt(rec.det_id_minus(r));
    case Weight::full:
      return 1.0 / rec.det_id_minus(r);
    case Weight::unstable:
      return std::pow(std::abs(rec.stability.lambda), -r);
  }
  return 0.0;
}

// q * 1_{m in qN}, or its roots-of-unity expansion.
cplx filter(int m, const SeriesOptions& o) {
  if (o.dirichlet_sign) return m % 2 == 0 ? 1.0 : -1.0;
  if (o.q == 1) return 1.0;
  if (!o.roots_of_unity) return m % o.q == 0 ? static_cast<double>(o.q) : 0.0;
  cplx sum = 0.0;
  for (int j = 0; j < o.q; ++j) sum += std::polar(1.0, kTwoPi * j * m / o.q);
  return sum;
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

IntMatrix reflection_matrix(int q) {
  if (q < 1) throw ContractViolation("q must be >= 1");
  IntMatrix a(q, std::vector<long long>(q, 0));
  for (int i = 0; i < q; ++i) a[i][(i + q - 1) % q] = 1;
  return a;
}

IntMatrix matrix_power(const IntMatrix& a, int n) {
  if (n < 0) throw ContractViolation("matrix_power: negative exponent");
  const std::size_t q = a.size();
  IntMatrix out(q, std::vector<long long>(q, 0));
  for (std::size_t i = 0; i < q; ++i) out[i][i] = 1;
  for (int k = 0; k < n; ++k) {
    IntMatrix next(q, std::vector<long long>(q, 0));
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t l = 0; l < q; ++l)
        if (out[i][l] != 0)
          for (std::size_t j = 0; j < q; ++j) next[i][j] += out[i][l] * a[l][j];
    out = std::move(next);
  }
  return out;
}

long long reflection_trace(int q, int m) {
  const IntMatrix p = matrix_power(reflection_matrix(q), m);
  long long tr = 0;
  for (int i = 0; i < q; ++i) tr += p[i][i];
  return tr;
}

cplx orbit_sum(const OrbitDatabase& db, cplx s, const SeriesOptions& options) {
  if (options.q < 1) throw ContractViolation("q must be >= 1");
  check_cutoff(db, options.cutoff);
  cplx total = 0.0;
  for (const auto& rec : db.records()) {
    const double tp = rec.period();
    for (int r = 1; r * tp <= options.cutoff + kCountSlack; ++r) {
      const int m = r * rec.reflections();
      const cplx f = filter(m, options);
      if (f == 0.0) continue;
      total += f * tp * std::exp(-s * (r * tp)) * ray_weight(rec, r, options.weight);
    }
  }
  return total;
}

cplx eta_direct(const OrbitDatabase& db, cplx s, int q, bool dirichlet_sign, double cutoff,
                bool roots_of_unity) {
  SeriesOptions o;
  o.weight = Weight::half;
  o.q = q;
  o.dirichlet_sign = dirichlet_sign;
  o.roots_of_unity = roots_of_unity;
  o.cutoff = cutoff;
  return orbit_sum(db, s, o);
}

cplx series_full_power(const OrbitDatabase& db, cplx s, Weight variant, double cutoff,
                       bool dirichlet_sign) {
  if (variant != Weight::full && variant != Weight::unstable) {
    throw ContractViolation("series_full_power: variant must be full or unstable");
  }
  SeriesOptions o;
  o.weight = variant;
  o.dirichlet_sign = dirichlet_sign;
  o.cutoff = cutoff;
  return orbit_sum(db, s, o);
}

double tail_bound(const geometry::Configuration& config, double re_s, double beta,
                  int first_length) {
  const double d0 = geometry::min_separation(config);
  double diameter = 0.0, kb_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.size(); ++i) {
    kb_min = std::min(kb_min, config[i].curvature());
    for (int j = 0; j < config.size(); ++j) {
      diameter = std::max(diameter, geometry::norm(config[i].center - config[j].center) +
                                        config[i].radius + config[j].radius);
    }
  }
  const double lam = 1.0 + 2.0 * d0 * kb_min;  // minimal expansion per bounce
  const int r = config.size();
  double total = 0.0;
  for (int n = std::max(1, first_length);; ++n) {
    const double len_exp = std::max(-re_s * n * d0, -re_s * n * diameter);
    const double log_term = std::log(static_cast<double>(r - 1)) * n + std::log(2.0 * n * diameter) +
                            len_exp - beta * n * std::log(lam) -
                            2.0 * beta * std::log1p(-std::pow(lam, -n));
    const double term = std::exp(log_term);
    total += term;
    const double rate = std::log(static_cast<double>(r - 1)) - re_s * (re_s >= 0 ? d0 : diameter) -
                        beta * std::log(lam);
    if (rate >= 0.0) return std::numeric_limits<double>::infinity();
    if (term < 1e-18 * total || term < 1e-300) break;
  }
  return total;
}

std::vector<double> shell_sums(const OrbitDatabase& db, double s, Weight weight, int q,
                               bool dirichlet_sign) {
  SeriesOptions o;
  o.weight = weight;
  o.q = q;
  o.dirichlet_sign = dirichlet_sign;
  std::vector<double> shells(static_cast<std::size_t>(db.n_max()), 0.0);
  for (const auto& rec : db.records()) {
    const int np = rec.reflections();
    for (int r = 1; r * np <= db.n_max(); ++r) {
      const int m = r * np;
      const double f = filter(m, o).real();
      if (f == 0.0) continue;
      shells[m - 1] += f * rec.period() * std::exp(-s * r * rec.period()) * ray_weight(rec, r, weight);
    }
  }
  return shells;
}

AbscissaEstimate abscissa_estimate(const OrbitDatabase& db, Weight weight, int q, int window) {
  if (window < 3) throw ContractViolation("abscissa_estimate: window must be >= 3");
  if (q < 1) throw ContractViolation("q must be >= 1");
  AbscissaEstimate est;
  // Shells with m outside qN vanish; regress only the surviving ones.
  auto slope_at = [&](double s, int last) {
    const auto shells = shell_sums(db, s, weight, q);
    std::vector<double> x, y;
    for (int n = last; n >= 2 && static_cast<int>(x.size()) < window; --n) {
      if (n % q != 0) continue;
      x.push_back(n);
      y.push_back(std::log(shells[n - 1]));
    }
    return linear_slope(x, y);
  };
  auto root = [&](int last) {
    double lo = -1.0, hi = 1.0;
    for (int i = 0; slope_at(lo, last) < 0.0; ++i) {
      if (i == 60) throw NumericalError("abscissa_estimate: no lower bracket");
      lo *= 2.0;
    }
    for (int i = 0; slope_at(hi, last) > 0.0; ++i) {
      if (i == 60) throw NumericalError("abscissa_estimate: no upper bracket");
      hi *= 2.0;
    }
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (slope_at(mid, last) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // Trailing windows ending at the last three surviving shells.
  const int top = db.n_max() - db.n_max() % q;
  for (int w = 0; w < 3; ++w) {
    const int last = top - w * q;
    if (last / q - (2 + q - 1) / q + 1 < window) break;
    est.windows.push_back(root(last));
  }
  if (est.windows.empty()) {
    est.wide = true;
    est.error = std::numeric_limits<double>::infinity();
    return est;
  }
  const auto [mn, mx] = std::minmax_element(est.windows.begin(), est.windows.end());
  double mean = 0.0;
  for (double v : est.windows) mean += v;
  est.s = mean / static_cast<double>(est.windows.size());
  est.error = 0.5 * (*mx - *mn);
  est.wide = est.windows.size() < 2 || est.error > 0.02;
  return est;
}

SignedSeriesReport signed_series_test(const OrbitDatabase& db, double s) {
  const auto c = shell_sums(db, s, Weight::full);
  SignedSeriesReport rep;
  double partial = 0.0;
  for (double v : c) {
    partial += v;
    rep.unsigned_partial.push_back(partial);
  }
  // Shell n has sign (-1)^n; group (n, n+1) starting at the first even shell.
  std::vector<double> x, y;
  for (std::size_t n = 2; n + 1 <= c.size(); n += 2) {
    const double inc = std::abs(c[n - 1] - c[n]);
    rep.grouped_increments.push_back(inc);
    x.push_back(static_cast<double>(n));
    y.push_back(std::log(inc));
  }
  rep.decay_ratio = x.size() >= 2 ? std::exp(2.0 * linear_slope(x, y)) : 1.0;
  return rep;
}

DeterminantExpansion::DeterminantExpansion(std::vector<Atom> atoms, int order, int k_max,
                                           Twist twist)
    : atoms_(std::move(atoms)), order_(order), k_max_(k_max), twist_(twist) {}

DeterminantExpansion::Value DeterminantExpansion::evaluate(cplx s) const {
  const auto n = static_cast<std::size_t>(order_);
  // log D = sum_n l_n with l_n = -sum_{atoms of length n} w e^{-s tau} / r.
  std::vector<cplx> l(n + 1, 0.0), dl(n + 1, 0.0);
  for (const auto& a : atoms_) {
    const cplx e = a.weight * std::exp(-s * a.tau);
    l[a.length] -= e / static_cast<double>(a.repetition);
    dl[a.length] += a.tau_primitive * e;
  }
  Value v;
  v.shells.assign(n + 1, 0.0);
  std::vector<cplx> dd(n + 1, 0.0);
  v.shells[0] = 1.0;
  for (std::size_t m = 1; m <= n; ++m) {
    cplx acc = 0.0, dacc = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double jj = static_cast<double>(j);
      acc += jj * l[j] * v.shells[m - j];
      dacc += jj * (dl[j] * v.shells[m - j] + l[j] * dd[m - j]);
    }
    v.shells[m] = acc / static_cast<double>(m);
    dd[m] = dacc / static_cast<double>(m);
  }
  v.d = 0.0;
  v.dd = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    v.d += v.shells[m];
    v.dd += dd[m];
  }
  return v;
}

cplx DeterminantExpansion::log_derivative_series(cplx s) const {
  cplx sum = 0.0;
  for (const auto& a : atoms_) sum += a.tau_primitive * a.weight * std::exp(-s * a.tau);
  return sum;
}

double DeterminantExpansion::trust_margin(cplx s) const {
  const double last = std::abs(evaluate(s).shells.back());
  return -std::log10(std::max(last, 1e-300)) - 8.0;
}

double DeterminantExpansion::trust_floor() const {
  double s = 4.0;
  while (s > -20.0 && trust_margin(s - 1.0 / 64.0) > 0.0) s -= 1.0 / 64.0;
  return s;
}

DeterminantExpansion build_determinant(const OrbitDatabase& db, int order, int k_max,
                                       Twist twist) {
  if (order < 1) throw ContractViolation("determinant order must be >= 1");
  if (k_max < 0) throw ContractViolation("k_max must be >= 0");
  if (twist.q < 1) throw ContractViolation("twist q must be >= 1");
  if (order > db.n_max()) {
    throw IncompleteData("determinant order " + std::to_string(order) +
                         " exceeds orbit database length " + std::to_string(db.n_max()));
  }
  std::vector<Atom> atoms;
  for (const auto& rec : db.records()) {
    const int np = rec.reflections();
    const double lam = rec.stability.lambda;
    for (int r = 1; r * np <= order; ++r) {
      const double x = std::pow(lam, -r);
      double ksum = 0.0, xk = 1.0;
      for (int k = 0; k <= k_max; ++k, xk *= x) ksum += xk;
      const int m = r * np;
      const cplx phase = twist.j % twist.q == 0
                             ? cplx(1.0)
                             : std::polar(1.0, kTwoPi * ((static_cast<long long>(twist.j) * m) %
                                                         twist.q) /
                                                   twist.q);
      Atom a;
      a.length = m;
      a.repetition = r;
      a.tau = r * rec.period();
      a.tau_primitive = rec.period();
      a.weight = phase * std::pow(std::abs(lam), -0.5 * r) * ksum;
      atoms.push_back(a);
    }
  }
  return DeterminantExpansion(std::move(atoms), order, k_max, twist);
}

AnalyticFunction as_function(const DeterminantExpansion& det) {
  return [&det](cplx s) {
    const auto v = det.evaluate(s);
    return std::make_pair(v.d, v.dd);
  };
}

AnalyticFunction product_function(std::vector<const DeterminantExpansion*> factors) {
  return [factors = std::move(factors)](cplx s) {
    cplx d = 1.0, dd = 0.0;
    for (const auto* f : factors) {
      const auto v = f->evaluate(s);
      dd = dd * v.d + d * v.dd;
      d *= v.d;
    }
    return std::make_pair(d, dd);
  };
}

namespace {

// Change of arg f along a -> b, refined until consecutive samples turn by at
// most pi/4 and the step is short against the local scale |f / f'|.
double phase_change(const AnalyticFunction& f, cplx a, cplx b, const std::pair<cplx, cplx>& fa,
                    const std::pair<cplx, cplx>& fb, int depth) {
  const double turn = std::arg(fb.first / fa.first);
  const double rate = std::max(std::abs(fa.second / fa.first), std::abs(fb.second / fb.first));
  if (std::abs(turn) <= 0.25 * std::numbers::pi && std::abs(b - a) * rate <= 1.0) return turn;
  if (depth == 0) {
    throw TrustRegionViolation("zero on or too close to a cell edge near " +
                               std::to_string(a.real()) + (a.imag() < 0 ? " - " : " + ") +
                               std::to_string(std::abs(a.imag())) + "i");
  }
  const cplx m = 0.5 * (a + b);
  const auto fm = f(m);
  if (fm.first == 0.0) throw TrustRegionViolation("zero on a cell edge");
  return phase_change(f, a, m, fa, fm, depth - 1) + phase_change(f, m, b, fm, fb, depth - 1);
}

std::vector<cplx> box(double x0, double x1, double y0, double y1) {
  return {cplx(x0, y0), cplx(x1, y0), cplx(x1, y1), cplx(x0, y1)};
}

bool inside(cplx z, double x0, double x1, double y0, double y1, double slack) {
  return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
         z.imag() <= y1 + slack;
}

// Newton's method from z; nullopt unless the step size falls to rounding.
std::optional<cplx> newton(const AnalyticFunction& f, cplx z) {
  for (int it = 0; it < 60; ++it) {
    const auto [d, dd] = f(z);
    if (d == 0.0) return z;
    if (dd == 0.0 || !std::isfinite(std::abs(dd))) return std::nullopt;
    const cplx step = d / dd;
    z -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) return z;
  }
  return std::nullopt;
}

void resolve_cell(const AnalyticFunction& f, double x0, double x1, double y0, double y1,
                  int wind, int depth, const PoleSearch& search, std::vector<Pole>& out) {
  if (wind == 0) return;
  const cplx centre(0.5 * (x0 + x1), 0.5 * (y0 + y1));
  const double size = std::max(x1 - x0, y1 - y0);
  if (wind == 1) {
    const auto z = newton(f, centre);
    if (z && inside(*z, x0, x1, y0, y1, 1e-9 * size)) {
      out.push_back({*z, 1, 1.0, 0.0});
      return;
    }
  }
  if (depth >= search.max_depth) {
    out.push_back({centre, wind, static_cast<double>(wind), 0.0});
    return;
  }
  // Split slightly off centre so symmetric zeros avoid the new edges.
  const double xm = x0 + 0.4871 * (x1 - x0);
  const double ym = y0 + 0.4923 * (y1 - y0);
  const double xs[3] = {x0, xm, x1};
  const double ys[3] = {y0, ym, y1};
  int sum = 0;
  std::vector<std::pair<std::array<double, 4>, int>> children;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      const double w = winding_number(f, box(xs[i], xs[i + 1], ys[j], ys[j + 1]));
      const long long rounded = std::llround(w);
      if (std::abs(w - static_cast<double>(rounded)) > 0.05 || rounded < 0) {
        throw TrustRegionViolation("non-integer winding " + std::to_string(w) +
                                   " while subdividing a cell");
      }
      sum += static_cast<int>(rounded);
      children.push_back({{xs[i], xs[i + 1], ys[j], ys[j + 1]}, static_cast<int>(rounded)});
    }
  }
  if (sum != wind) {
    throw TrustRegionViolation("subdivided windings " + std::to_string(sum) +
                               " do not add up to " + std::to_string(wind));
  }
  for (const auto& [c, w] : children) {
    resolve_cell(f, c[0], c[1], c[2], c[3], w, depth + 1, search, out);
  }
}

}  // namespace

double winding_number(const AnalyticFunction& f, const std::vector<cplx>& polygon) {
  std::vector<std::pair<cplx, cplx>> values;
  for (const cplx& z : polygon) {
    values.push_back(f(z));
    if (values.back().first == 0.0) throw TrustRegionViolation("zero on a cell vertex");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const std::size_t j = (i + 1) % polygon.size();
    total += phase_change(f, polygon[i], polygon[j], values[i], values[j], 40);
  }
  return total / kTwoPi;
}

std::vector<Pole> find_poles(const AnalyticFunction& f, const Rect& rect,
                             const PoleSearch& search) {
  if (!(rect.re_max > rect.re_min && rect.im_max > rect.im_min)) {
    throw ContractViolation("find_poles: empty rectangle");
  }
  if (search.nx < 1 || search.ny < 1) throw ContractViolation("find_poles: empty grid");
  const double dx = (rect.re_max - rect.re_min) / search.nx;
  const double dy = (rect.im_max - rect.im_min) / search.ny;
  const std::size_t cells = static_cast<std::size_t>(search.nx) * search.ny;
  std::vector<std::vector<Pole>> found(cells);
  std::vector<std::string> errors(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const int i = static_cast<int>(c % search.nx), j = static_cast<int>(c / search.nx);
      const double x0 = rect.re_min + i * dx, x1 = i + 1 == search.nx ? rect.re_max : x0 + dx;
      const double y0 = rect.im_min + j * dy, y1 = j + 1 == search.ny ? rect.im_max : y0 + dy;
      try {
        const double w = winding_number(f, box(x0, x1, y0, y1));
        const long long rounded = std::llround(w);
        if (std::abs(w - static_cast<double>(rounded)) > 0.05 || rounded < 0) {
          throw TrustRegionViolation("winding number " + std::to_string(w) +
                                     " is not a non-negative integer in cell [" +
                                     std::to_string(x0) + ", " + std::to_string(x1) + "] x [" +
                                     std::to_string(y0) + ", " + std::to_string(y1) + "]");
        }
        resolve_cell(f, x0, x1, y0, y1, static_cast<int>(rounded), 0, search, found[c]);
        for (auto& p : found[c]) {
          if (p.multiplicity == static_cast<int>(rounded)) p.winding = w;
        }
      } catch (const Error& e) {
        errors[c] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(search.jobs, static_cast<int>(cells)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw TrustRegionViolation(e);
  }
  std::vector<Pole> poles;
  for (auto& v : found) poles.insert(poles.end(), v.begin(), v.end());
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
    if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
    return a.location.real() < b.location.real();
  });
  return poles;
}

std::vector<Pole> find_poles(const DeterminantExpansion& det, const Rect& rect,
                             const PoleSearch& search) {
  const double floor = det.trust_floor();
  if (rect.re_min < floor) {
    throw TrustRegionViolation("rectangle reaches Re s = " + std::to_string(rect.re_min) +
                               ", below the determinant's trust floor " + std::to_string(floor));
  }
  auto poles = find_poles(as_function(det), rect, search);
  for (auto& p : poles) p.trust_margin = det.trust_margin(p.location);
  return poles;
}

CountingReport counting_check(const OrbitDatabase& db, double h, int points) {
  if (!(h > 0.0)) throw ContractViolation("counting_check: h must be positive");
  if (points < 10) throw ContractViolation("counting_check: need at least 10 points");
  CountingReport rep;
  rep.x_max = db.complete_period() * (1.0 - 1e-12);
  rep.top_min = 0.9 * rep.x_max;
  std::vector<double> periods;
  for (const auto& rec : db.records()) periods.push_back(rec.period());
  std::sort(periods.begin(), periods.end());
  std::vector<double> tx, ty;
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= points; ++i) {
    CountingRow row;
    row.x = rep.x_max * i / points;
    row.count = std::upper_bound(periods.begin(), periods.end(), row.x + kCountSlack) - periods.begin();
    row.prediction = std::exp(h * row.x) / (h * row.x);
    row.ratio = static_cast<double>(row.count) / row.prediction;
    if (row.x >= rep.top_min) {
      tx.push_back(row.x);
      ty.push_back(row.ratio);
      rep.ratio_min = std::min(rep.ratio_min, row.ratio);
      rep.ratio_max = std::max(rep.ratio_max, row.ratio);
    }
    rep.rows.push_back(row);
  }
  rep.trend_slope = tx.size() >= 2 ? linear_slope(tx, ty) : 0.0;
  bool up = true, down = true;
  for (std::size_t i = 1; i < ty.size(); ++i) {
    up = up && ty[i] >= ty[i - 1];
    down = down && ty[i] <= ty[i - 1];
  }
  rep.monotone = up || down;
  return rep;
}

}  // namespace bzeta::zeta
