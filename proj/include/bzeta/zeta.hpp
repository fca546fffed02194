#pragma once

// Orbit Dirichlet series, the cycle-expanded determinant whose zeros are the
// poles of eta_1 (and of its twisted relatives), a contour-integral zero
// finder, abscissa estimates and the length-counting check.

#include <complex>
#include <functional>
#include <vector>

#include "bzeta/orbit_database.hpp"

namespace bzeta::zeta {

using cplx = std::complex<double>;

enum class Weight {
  none,      // tau#
  half,      // tau# / |det(Id - P)|^{1/2}
  full,      // tau# / |det(Id - P)|
  unstable,  // tau# / |Lambda|^r
};

struct SeriesOptions {
  Weight weight = Weight::half;
  int q = 1;                    // keep m in qN, scaled by q
  bool dirichlet_sign = false;  // insert (-1)^m; q is then ignored
  bool roots_of_unity = false;  // evaluate the q filter as sum_j e^{2 pi i j m / q}
  double cutoff = 0.0;          // keep tau <= cutoff
};

/// q x q cyclic shift, A(q) (xi_1, ..., xi_q) = (xi_q, xi_1, ..., xi_{q-1}).
using IntMatrix = std::vector<std::vector<long long>>;
IntMatrix reflection_matrix(int q);
IntMatrix matrix_power(const IntMatrix& a, int n);
/// trace A(q)^m, the per-ray weight of the q-reflection bundle.
long long reflection_trace(int q, int m);

/// Partial sum over oriented periodic rays (primitive cycles and their
/// repetitions) in database order, repetitions ascending. Throws
/// IncompleteData when the cutoff reaches past the database's complete range.
cplx orbit_sum(const OrbitDatabase& db, cplx s, const SeriesOptions& options);

/// eta_q (q >= 1) or, with dirichlet_sign, eta_D.
cplx eta_direct(const OrbitDatabase& db, cplx s, int q, bool dirichlet_sign, double cutoff,
                bool roots_of_unity = false);

/// Weights 1/|det(Id - P)| (Weight::full) or 1/|Lambda|^r (Weight::unstable).
cplx series_full_power(const OrbitDatabase& db, cplx s, Weight variant, double cutoff,
                       bool dirichlet_sign = false);

/// Rigorous bound on the sum over rays with at least `first_length`
/// reflections of |tau# e^{-s tau}| |det(Id - P)|^{-beta}, using only the
/// minimal flight, the configuration diameter and the minimal expansion per
/// bounce. Infinite when the majorant does not converge.
double tail_bound(const geometry::Configuration& config, double re_s, double beta,
                  int first_length);

/// Sums of the series over rays with exactly n reflections, n = 1..n_max
/// (index n-1), at real s.
std::vector<double> shell_sums(const OrbitDatabase& db, double s, Weight weight, int q = 1,
                               bool dirichlet_sign = false);

struct AbscissaEstimate {
  double s = 0.0;
  double error = 0.0;           // half spread over windows
  std::vector<double> windows;  // estimate per regression window
  bool wide = false;            // error above 0.02 or too few shells
};

/// Abscissa of convergence as the s where the growth rate of the reflection
/// shells vanishes, from log-linear regressions over trailing windows.
AbscissaEstimate abscissa_estimate(const OrbitDatabase& db, Weight weight, int q = 1,
                                   int window = 5);

/// Pairwise-grouped increments of the signed series (-1)^m at real s, and
/// partial sums of the unsigned series, shell by shell.
struct SignedSeriesReport {
  std::vector<double> grouped_increments;  // |c_n - c_{n+1}| for odd n
  std::vector<double> unsigned_partial;    // sum_{j <= n} c_j
  double decay_ratio = 0.0;                // geometric fit of grouped increments
};
SignedSeriesReport signed_series_test(const OrbitDatabase& db, double s);

/// Complex roots of unity phase attached to each primitive factor: the
/// factor of a cycle with m reflections is multiplied by e^{2 pi i j m / q}.
struct Twist {
  int q = 1;
  int j = 0;
};

/// One (cycle, repetition) contribution to log D.
struct Atom {
  int length = 0;           // reflections r * n_p
  int repetition = 1;       // r
  double tau = 0.0;         // r T_p
  double tau_primitive = 0.0;
  cplx weight;              // phase |Lambda|^{-r/2} sum_{k <= k_max} Lambda^{-k r}
};

/// D(s) = prod_{k=0}^{k_max} prod_p (1 - t_{p,k}(s)),
/// t_{p,k} = e^{-s T_p} |Lambda_p|^{-1/2} Lambda_p^{-k}, expanded in powers of
/// the symbolic length and truncated at N.
class DeterminantExpansion {
 public:
  DeterminantExpansion(std::vector<Atom> atoms, int order, int k_max, Twist twist);

  int order() const { return order_; }
  int k_max() const { return k_max_; }
  Twist twist() const { return twist_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  struct Value {
    cplx d;                    // D_N(s)
    cplx dd;                   // D_N'(s)
    std::vector<cplx> shells;  // d_n(s), n = 0..N
  };
  Value evaluate(cplx s) const;
  cplx value(cplx s) const { return evaluate(s).d; }

  /// d/ds log D from the un-resummed logarithm: the eta_1 atoms with at most
  /// N reflections, k-sum truncated at k_max.
  cplx log_derivative_series(cplx s) const;

  /// -log10 |d_N(s)| - 8: positive where the last shell is below 1e-8.
  double trust_margin(cplx s) const;

  /// Smallest real s (scanning down in steps of 1/64 from a value where the
  /// last shell is negligible) above which the last shell stays below 1e-8 on
  /// the real axis.
  double trust_floor() const;

 private:
  std::vector<Atom> atoms_;
  int order_;
  int k_max_;
  Twist twist_;
};

DeterminantExpansion build_determinant(const OrbitDatabase& db, int order, int k_max = 6,
                                       Twist twist = {});

/// Analytic function with derivative, for the zero finder.
using AnalyticFunction = std::function<std::pair<cplx, cplx>(cplx)>;

AnalyticFunction as_function(const DeterminantExpansion& det);
/// Product of determinants (zeros of eta_2 = zeros of D * D_twisted).
AnalyticFunction product_function(std::vector<const DeterminantExpansion*> factors);

struct Rect {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
};

struct Pole {
  cplx location;
  int multiplicity = 1;
  double winding = 0.0;  // raw winding number before rounding
  double trust_margin = 0.0;
};

struct PoleSearch {
  int nx = 8;            // cells along Re
  int ny = 8;            // cells along Im
  int max_depth = 30;    // subdivision levels before a cell is reported as one zero
  int jobs = 1;
};

/// Zeros of f inside the rectangle by the argument principle on a grid of
/// cells, subdivided until each holds one zero, which Newton's method from
/// the cell centre then locates.
/// Ordered by imaginary part, then real part. Throws TrustRegionViolation
/// when a winding number is not within 0.05 of an integer.
std::vector<Pole> find_poles(const AnalyticFunction& f, const Rect& rect,
                             const PoleSearch& search);

/// Poles of eta_1 from a determinant: refuses rectangles below its trust
/// floor and fills in trust margins.
std::vector<Pole> find_poles(const DeterminantExpansion& det, const Rect& rect,
                             const PoleSearch& search);

/// Winding number of f around a closed polygon, by tracking arg f.
double winding_number(const AnalyticFunction& f, const std::vector<cplx>& polygon);

struct CountingRow {
  double x = 0.0;
  long long count = 0;  // primitive oriented rays with tau# <= x
  double prediction = 0.0;  // e^{hx} / (hx)
  double ratio = 0.0;       // count / prediction
};

struct CountingReport {
  std::vector<CountingRow> rows;
  double x_max = 0.0;       // completeness limit of the database
  double top_min = 0.0;     // top decade is [top_min, x_max]
  double ratio_min = 0.0;   // over the top decade
  double ratio_max = 0.0;
  double trend_slope = 0.0; // least squares d(ratio)/dx over the top decade
  bool monotone = false;    // ratio monotone over the top decade
};

/// N(x) against e^{hx}/(hx) on an even grid of `points` values of x up to the
/// completeness limit of the database.
CountingReport counting_check(const OrbitDatabase& db, double h, int points = 200);

}  // namespace bzeta::zeta
