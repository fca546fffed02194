#pragma once

// Test functions against the orbit measures: the bump rho with nonnegative
// Fourier transform, Ikawa-type pairings, the Gaussian weight G(t, sigma) and
// the shell search for large full-weight sums.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bzeta/orbit_database.hpp"
#include "bzeta/zeta.hpp"

namespace bzeta::trace {

using cplx = std::complex<double>;

/// rho = c (phi * phi) with phi(t) = exp(-1 / (1/4 - t^2)) on |t| < 1/2.
class BumpFunction {
 public:
  static constexpr double support = 1.0;

  double operator()(double t) const;
  /// c phi_hat(lambda)^2, the transform of the autocorrelation.
  double fourier(double lambda) const;
  /// int rho(t) cos(lambda t) dt by composite Gauss-Legendre on cached samples.
  double fourier_direct(double lambda) const;
  /// int rho(u) e^{z u} du.
  cplx laplace(cplx z) const;
  double scale() const { return c_; }
  /// min over |t| <= 1/2, attained at |t| = 1/2.
  double inner_minimum() const { return (*this)(0.5); }

 private:
  friend BumpFunction make_bump();
  double c_ = 1.0;
  std::vector<double> nodes_;    // composite Gauss-Legendre nodes on [-1, 1]
  std::vector<double> weights_;
  std::vector<double> rho_;      // rho at nodes_
  std::vector<double> phi_nodes_, phi_weights_, phi_;  // same on [-1/2, 1/2]
};

inline constexpr double kBumpInnerMinimum = 1.05;

BumpFunction make_bump();

/// phi(t); zero for |t| >= 1/2.
double bump_factor(double t);

struct MeasureAtom {
  double tau = 0.0;
  double tau_primitive = 0.0;
  int reflections = 0;
  double weight = 0.0;
};

/// Finite sum of weighted Dirac masses at ray lengths, complete below cutoff.
struct AtomicMeasure {
  std::vector<MeasureAtom> atoms;
  double cutoff = 0.0;
  double d0 = 0.0;
};

/// Atoms of the series described by `options` (weight, q filter scaled by q,
/// or the sign (-1)^m) for all rays with tau <= cutoff. Throws IncompleteData
/// when the cutoff reaches past the database.
AtomicMeasure orbit_measure(const OrbitDatabase& db, const zeta::SeriesOptions& options);

/// sum (-1)^m tau# delta(t - tau) / |det(Id - P)|^{1/2}.
AtomicMeasure dirichlet_measure(const OrbitDatabase& db, double cutoff);

/// Atoms of eta_q, q * 1_{m in qN} tau# / |det(Id - P)|^{1/2}.
AtomicMeasure eta_measure(const OrbitDatabase& db, int q, double cutoff);

struct Pairing {
  double value = 0.0;
  int atoms = 0;  // atoms inside the open window |tau - ell| < 1/m
};

/// <measure, rho(m (t - ell))>. Requires ell >= d0 and m >= max(1, 1/d0);
/// throws IncompleteData when ell + 1/m exceeds the measure's cutoff.
Pairing pair(const AtomicMeasure& measure, const BumpFunction& rho, double ell, double m);

struct IkawaRow {
  double ell = 0.0;
  double m = 0.0;
  double value = 0.0;  // |<F, rho_j>|
  double bound = 0.0;  // e^{-alpha0 ell}
  bool pass = false;
  int atoms = 0;
};

struct IkawaScan {
  std::vector<IkawaRow> rows;
  /// log|value| ~ log c - c0 ell by least squares; c then lowered until
  /// c e^{-c0 ell} is below every row.
  double c = 0.0;
  double c0 = 0.0;
  int passes = 0;
};

/// Rows for the given ell values with m = e^{beta ell}.
IkawaScan ikawa_scan(const AtomicMeasure& measure, const BumpFunction& rho, double beta,
                     double alpha0, const std::vector<double>& ells);

/// ell_j = j tau#(gamma0), j = 1..j_max.
IkawaScan ikawa_sequence(const AtomicMeasure& measure, const BumpFunction& rho,
                         double tau_gamma0, double beta, double alpha0, int j_max);

struct GaussianWeight {
  double t = 0.0;
  double sigma = 0.0;
  double direct = 0.0;
  double quadrature = 0.0;
  double error_estimate = 0.0;  // truncation plus aliasing bound for the trapezoid
  double lower_bound = 0.0;     // sqrt(2 pi) min rho^2 sum_{|tau - t| <= 1/2} tau# / |det|
  int atoms = 0;                // rays with |tau - t| < 1
};

/// G(t, sigma) as the double sum over rays and as
/// sigma^{1/2} int |S(t, xi)|^2 e^{-sigma xi^2 / 2} d xi by the trapezoid rule
/// on [-xi_max, xi_max]. Throws NumericalError when the error estimate
/// exceeds `tolerance` times the scale (sum |w| rho)^2.
GaussianWeight gaussian_weight(const OrbitDatabase& db, const BumpFunction& rho, double t,
                               double sigma, double xi_max, double step,
                               double tolerance = 1e-10);

/// xi_max and step that keep the error estimate of gaussian_weight far below
/// 1e-12 of the scale.
struct QuadratureGrid {
  double xi_max = 0.0;
  double step = 0.0;
};
QuadratureGrid default_quadrature(double sigma);

struct Shell {
  double t = 0.0;
  double sum = 0.0;    // sum of tau# / |det(Id - P)| over rays with |tau - t| <= 1/2
  double bound = 0.0;  // e^{(b - 2 eps) t}
  int rays = 0;
  int distinct_lengths = 0;
  bool qualifies = false;
};

struct ShellSearch {
  int which_case = 0;       // 1: b1 < 0, 2: b1 > 0, 3: b1 = 0 with u
  double exponent = 0.0;    // b1 - 2 eps, or -u/2 - 2 eps
  std::vector<Shell> shells;
  std::vector<double> t;    // qualifying shell centres, increasing
  double density = 0.0;     // qualifying / scanned
  std::string diagnostics;
};

/// Scans shell centres first_center, first_center + 1, ... <= t_max and keeps
/// those whose full-weight shell sum reaches e^{(b1 - 2 eps) t}. For b1 = 0
/// the bound uses -u/2 in place of b1 and u must be given.
ShellSearch large_shell_search(const OrbitDatabase& db, double b1, double eps, double t_max,
                           std::optional<double> u = std::nullopt, double first_center = 0.5);

struct TraceCompareRow {
  double ell = 0.0;
  double orbit_side = 0.0;  // <eta_1 atoms, rho(m (t - ell))>
  cplx resonance_side;      // sum_k int e^{s_k t} rho(m (t - ell)) dt
  int poles = 0;
};

/// Experimental: orbit side of the trace formula against the contribution of
/// the given zeros of the determinant (multiplicities counted).
std::vector<TraceCompareRow> trace_compare(const AtomicMeasure& measure, const BumpFunction& rho,
                                           const std::vector<zeta::Pole>& poles,
                                           const std::vector<double>& ells, double m);

}  // namespace bzeta::trace
