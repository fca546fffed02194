#include "bzeta/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "bzeta/errors.hpp"

namespace bzeta::trace {

namespace {

constexpr int kPanels = 64;
constexpr double kSqrtTwoPi = 2.5066282746310002;  // sqrt(2 pi)

using Legendre = boost::math::quadrature::gauss<double, 20>;

// Composite Gauss-Legendre rule on [a, b].
void composite_rule(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  const auto& abs = Legendre::abscissa();
  const auto& wts = Legendre::weights();
  const double h = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      x.push_back(mid - 0.5 * h * abs[i]);
      w.push_back(0.5 * h * wts[i]);
      if (abs[i] != 0.0) {
        x.push_back(mid + 0.5 * h * abs[i]);
        w.push_back(0.5 * h * wts[i]);
      }
    }
  }
}

double autocorrelation(double t) {
  t = std::abs(t);
  if (t >= 1.0) return 0.0;
  // Composite Gauss-Legendre; the integrand is flat to all orders at both ends.
  const auto& abs = Legendre::abscissa();
  const auto& wts = Legendre::weights();
  constexpr int panels = 16;
  const double a = t - 0.5, h = (1.0 - t) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      const double lo = mid - 0.5 * h * abs[i], hi = mid + 0.5 * h * abs[i];
      double f = bump_factor(lo) * bump_factor(lo - t);
      if (abs[i] != 0.0) f += bump_factor(hi) * bump_factor(hi - t);
      sum += wts[i] * f;
    }
  }
  return 0.5 * h * sum;
}

void check_measure_cutoff(const AtomicMeasure& measure, double reach) {
  if (reach > measure.cutoff) {
    throw IncompleteData("window reaches " + std::to_string(reach) +
                         " beyond the measure cutoff " + std::to_string(measure.cutoff));
  }
}

void fit_decay(IkawaScan& scan) {
  std::vector<double> x, y;
  for (const auto& r : scan.rows) {
    if (r.value > 0.0) {
      x.push_back(r.ell);
      y.push_back(std::log(r.value));
    }
  }
  if (x.size() < 2) return;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  scan.c0 = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  double log_c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) log_c = std::min(log_c, y[i] + scan.c0 * x[i]);
  scan.c = std::exp(log_c);
}

}  // namespace

double bump_factor(double t) {
  const double d = 0.25 - t * t;
  return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
}

BumpFunction make_bump() {
  BumpFunction b;
  // The autocorrelation of an even log-concave function is even and
  // unimodal, so its minimum on |t| <= 1/2 is at t = 1/2.
  b.c_ = kBumpInnerMinimum / autocorrelation(0.5);
  composite_rule(-1.0, 1.0, b.nodes_, b.weights_);
  for (double x : b.nodes_) b.rho_.push_back(b.c_ * autocorrelation(x));
  composite_rule(-0.5, 0.5, b.phi_nodes_, b.phi_weights_);
  for (double x : b.phi_nodes_) b.phi_.push_back(bump_factor(x));
  return b;
}

double BumpFunction::operator()(double t) const { return c_ * autocorrelation(t); }

double BumpFunction::fourier(double lambda) const {
  double phi_hat = 0.0;
  for (std::size_t i = 0; i < phi_.size(); ++i) {
    phi_hat += phi_weights_[i] * phi_[i] * std::cos(lambda * phi_nodes_[i]);
  }
  return c_ * phi_hat * phi_hat;
}

double BumpFunction::fourier_direct(double lambda) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    sum += weights_[i] * rho_[i] * std::cos(lambda * nodes_[i]);
  }
  return sum;
}

cplx BumpFunction::laplace(cplx z) const {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < rho_.size(); ++i) sum += weights_[i] * rho_[i] * std::exp(z * nodes_[i]);
  return sum;
}

AtomicMeasure orbit_measure(const OrbitDatabase& db, const zeta::SeriesOptions& options) {
  if (options.q < 1) throw ContractViolation("q must be >= 1");
  if (!(options.cutoff < db.complete_period())) {
    throw IncompleteData("measure cutoff " + std::to_string(options.cutoff) +
                         " reaches rays the orbit database may not contain (complete below " +
                         std::to_string(db.complete_period()) + ")");
  }
  AtomicMeasure out;
  out.cutoff = options.cutoff;
  out.d0 = db.min_separation();
  for (const auto& rec : db.records()) {
    const double tp = rec.period();
    for (int r = 1; r * tp <= options.cutoff; ++r) {
      const int m = r * rec.reflections();
      double filter = 1.0;
      if (options.dirichlet_sign) {
        filter = m % 2 == 0 ? 1.0 : -1.0;
      } else if (options.q > 1) {
        filter = m % options.q == 0 ? options.q : 0.0;
      }
      if (filter == 0.0) continue;
      double w = tp;
      switch (options.weight) {
        case zeta::Weight::none:
          break;
        case zeta::Weight::half:
          w /= std::sqrt(rec.det_id_minus(r));
          break;
        case zeta::Weight::full:
          w /= rec.det_id_minus(r);
          break;
        case zeta::Weight::unstable:
          w *= std::pow(std::abs(rec.stability.lambda), -r);
          break;
      }
      out.atoms.push_back({r * tp, tp, m, filter * w});
    }
  }
  return out;
}

AtomicMeasure dirichlet_measure(const OrbitDatabase& db, double cutoff) {
  zeta::SeriesOptions o;
  o.weight = zeta::Weight::half;
  o.dirichlet_sign = true;
  o.cutoff = cutoff;
  return orbit_measure(db, o);
}

AtomicMeasure eta_measure(const OrbitDatabase& db, int q, double cutoff) {
  zeta::SeriesOptions o;
  o.weight = zeta::Weight::half;
  o.q = q;
  o.cutoff = cutoff;
  return orbit_measure(db, o);
}

Pairing pair(const AtomicMeasure& measure, const BumpFunction& rho, double ell, double m) {
  if (!(ell >= measure.d0)) throw ContractViolation("pair: ell must be >= d0");
  if (!(m >= std::max(1.0, 1.0 / measure.d0))) {
    throw ContractViolation("pair: m must be >= max(1, 1/d0)");
  }
  check_measure_cutoff(measure, ell + 1.0 / m);
  Pairing out;
  for (const auto& a : measure.atoms) {
    const double u = m * (a.tau - ell);
    if (std::abs(u) >= 1.0) continue;
    out.value += a.weight * rho(u);
    ++out.atoms;
  }
  return out;
}

IkawaScan ikawa_scan(const AtomicMeasure& measure, const BumpFunction& rho, double beta,
                     double alpha0, const std::vector<double>& ells) {
  if (!(beta > 0.0)) throw ContractViolation("ikawa_scan: beta must be positive");
  IkawaScan scan;
  for (double ell : ells) {
    IkawaRow row;
    row.ell = ell;
    row.m = std::max(std::exp(beta * ell), std::max(1.0, 1.0 / measure.d0));
    const Pairing p = pair(measure, rho, ell, row.m);
    row.value = std::abs(p.value);
    row.atoms = p.atoms;
    row.bound = std::exp(-alpha0 * ell);
    row.pass = row.value >= row.bound;
    scan.passes += row.pass ? 1 : 0;
    scan.rows.push_back(row);
  }
  fit_decay(scan);
  return scan;
}

IkawaScan ikawa_sequence(const AtomicMeasure& measure, const BumpFunction& rho,
                         double tau_gamma0, double beta, double alpha0, int j_max) {
  if (!(tau_gamma0 > 0.0)) throw ContractViolation("ikawa_sequence: tau must be positive");
  if (j_max < 1) throw ContractViolation("ikawa_sequence: j_max must be >= 1");
  std::vector<double> ells;
  for (int j = 1; j <= j_max; ++j) ells.push_back(j * tau_gamma0);
  return ikawa_scan(measure, rho, beta, alpha0, ells);
}

QuadratureGrid default_quadrature(double sigma) {
  const double rs = std::sqrt(sigma);
  return {10.0 / rs, 2.0 * std::numbers::pi / (2.0 + 14.0 * rs)};
}

GaussianWeight gaussian_weight(const OrbitDatabase& db, const BumpFunction& rho, double t,
                               double sigma, double xi_max, double step, double tolerance) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ContractViolation("gaussian_weight: need 0 < sigma < 1");
  if (!(t > std::max(db.min_separation(), 1.0))) {
    throw ContractViolation("gaussian_weight: need t > max(d0, 1)");
  }
  if (!(xi_max > 0.0 && step > 0.0)) throw ContractViolation("gaussian_weight: bad quadrature grid");
  if (!(2.0 * std::numbers::pi / step > 2.0)) {
    throw ContractViolation("gaussian_weight: step must be below pi");
  }
  const AtomicMeasure all = eta_measure(db, 1, t + 1.0);

  GaussianWeight g;
  g.t = t;
  g.sigma = sigma;
  std::vector<double> tau, a;  // a = w rho(tau - t)
  double diagonal = 0.0;
  for (const auto& atom : all.atoms) {
    if (std::abs(atom.tau - t) >= 1.0) continue;
    tau.push_back(atom.tau);
    a.push_back(atom.weight * rho(atom.tau - t));
    if (std::abs(atom.tau - t) <= 0.5) {
      diagonal += atom.weight * atom.weight / atom.tau_primitive;  // tau# / |det|
    }
  }
  g.atoms = static_cast<int>(tau.size());
  const double rmin = rho.inner_minimum();
  g.lower_bound = kSqrtTwoPi * rmin * rmin * diagonal;

  for (std::size_t i = 0; i < tau.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double d = tau[i] - tau[j];
      row += a[j] * std::exp(-d * d / (2.0 * sigma));
    }
    g.direct += a[i] * row;
  }
  g.direct *= kSqrtTwoPi;

  // |S|^2 is even in xi; nodes k * step for |k| <= K, all weights step.
  const int K = static_cast<int>(std::ceil(xi_max / step));
  double sum = 0.0;
  for (int k = K; k >= 0; --k) {
    const double xi = k * step;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      re += a[i] * std::cos(xi * tau[i]);
      im += a[i] * std::sin(xi * tau[i]);
    }
    const double f = (re * re + im * im) * std::exp(-sigma * xi * xi / 2.0);
    sum += k == 0 ? f : 2.0 * f;
  }
  g.quadrature = std::sqrt(sigma) * step * sum;

  double l1 = 0.0;
  for (double v : a) l1 += std::abs(v);
  const double scale = l1 * l1;
  const double truncation = kSqrtTwoPi * std::erfc(K * step * std::sqrt(sigma / 2.0));
  double aliasing = 0.0;
  for (int n = 1; n < 1000; ++n) {
    const double gap = 2.0 * std::numbers::pi * n / step - 2.0;
    const double term = 2.0 * kSqrtTwoPi * std::exp(-gap * gap / (2.0 * sigma));
    aliasing += term;
    if (term < 1e-30 * aliasing || term == 0.0) break;
  }
  g.error_estimate = scale * (truncation + aliasing);
  if (g.error_estimate > tolerance * std::max(scale, std::numeric_limits<double>::min())) {
    throw NumericalError("gaussian_weight: quadrature error estimate " +
                         std::to_string(g.error_estimate) + " too large; raise xi_max or lower step");
  }
  return g;
}

ShellSearch large_shell_search(const OrbitDatabase& db, double b1, double eps, double t_max,
                           std::optional<double> u, double first_center) {
  if (!(eps > 0.0)) throw ContractViolation("large_shell_search: eps must be positive");
  ShellSearch out;
  if (b1 < 0.0) {
    out.which_case = 1;
    out.exponent = b1 - 2.0 * eps;
  } else if (b1 > 0.0) {
    out.which_case = 2;
    out.exponent = b1 - 2.0 * eps;
  } else {
    if (!u || !(*u > 0.0)) throw ContractViolation("large_shell_search: b1 = 0 needs u > 0");
    out.which_case = 3;
    out.exponent = -*u / 2.0 - 2.0 * eps;
  }
  zeta::SeriesOptions o;
  o.weight = zeta::Weight::full;
  o.cutoff = t_max + 1.0;
  const AtomicMeasure measure = orbit_measure(db, o);

  double best_margin = -std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (double t = first_center; t <= t_max; t += 1.0) {
    Shell sh;
    sh.t = t;
    sh.bound = std::exp(out.exponent * t);
    std::vector<double> lengths;
    for (const auto& a : measure.atoms) {
      if (std::abs(a.tau - t) > 0.5) continue;
      sh.sum += a.weight;
      ++sh.rays;
      lengths.push_back(a.tau);
    }
    std::sort(lengths.begin(), lengths.end());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (i == 0 || lengths[i] - lengths[i - 1] > 1e-9) ++sh.distinct_lengths;
    }
    sh.qualifies = sh.rays > 0 && sh.sum >= sh.bound;
    if (sh.qualifies) {
      if (!out.t.empty() && !(t > out.t.back())) {
        throw InternalConsistencyError("large_shell_search: shell centres not increasing");
      }
      out.t.push_back(t);
    }
    if (sh.rays > 0) {
      const double margin = std::log(sh.sum) - out.exponent * t;
      if (margin > best_margin) {
        best_margin = margin;
        best_t = t;
      }
    }
    out.shells.push_back(sh);
  }
  if (!out.shells.empty()) {
    out.density = static_cast<double>(out.t.size()) / static_cast<double>(out.shells.size());
  }
  if (out.t.empty()) {
    out.diagnostics = out.shells.empty()
                          ? "no shell centre below t_max"
                          : "no shell reaches the bound; best log margin " +
                                std::to_string(best_margin) + " at t = " + std::to_string(best_t);
  } else {
    out.diagnostics = std::to_string(out.t.size()) + " of " + std::to_string(out.shells.size()) +
                      " shells qualify";
  }
  return out;
}

std::vector<TraceCompareRow> trace_compare(const AtomicMeasure& measure, const BumpFunction& rho,
                                           const std::vector<zeta::Pole>& poles,
                                           const std::vector<double>& ells, double m) {
  std::vector<TraceCompareRow> rows;
  for (double ell : ells) {
    TraceCompareRow row;
    row.ell = ell;
    row.orbit_side = pair(measure, rho, ell, m).value;
    for (const auto& p : poles) {
      row.resonance_side += static_cast<double>(p.multiplicity) * std::exp(p.location * ell) / m *
                            rho.laplace(p.location / m);
      row.poles += p.multiplicity;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bzeta::trace
