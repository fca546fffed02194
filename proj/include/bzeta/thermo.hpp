#pragma once

// Thermodynamic formalism on the subshift: locally constant approximations of
// the flight-length and log-expansion potentials, transfer matrices, pressure
// and the abscissas h, a1, b1 as pressure roots.

#include <functional>
#include <vector>

#include "bzeta/orbit_database.hpp"
#include "bzeta/symbolic.hpp"

namespace bzeta::thermo {

using symbolic::Word;

/// One admissible word of length k+1, i.e. one allowed transition between
/// k-blocks, with its potential values.
struct Cylinder {
  Word word;
  int from = 0;  // index of word[0..k-1] in blocks
  int to = 0;    // index of word[1..k]
  double f = 0.0;
  double g = 0.0;
};

struct CylinderPotential {
  int alphabet = 0;
  int memory = 0;
  std::vector<Word> blocks;  // admissible k-words, lexicographic
  std::vector<Cylinder> cylinders;

  /// f + df and g + dg on every cylinder.
  CylinderPotential shifted(double df, double dg) const;
  /// Every cylinder gets the same (f, g).
  static CylinderPotential constant(int r, int k, double f, double g);
  const Cylinder& at(const Word& w) const;
};

/// Flight position inside a (k+1)-word whose orbit data define the cylinder
/// value: the central flight, so that both past and future are known.
int reference_flight(int k);

/// Values are read from the periodic orbit whose itinerary repeats w (or
/// w[0..k-1] when w closes on itself), at the reference flight. Throws
/// IncompleteData naming the word when its orbit is not in the database.
CylinderPotential build_potentials(const OrbitDatabase& db, int k);

/// max |value(k) - value(k+1)| over (k+2)-words, for f and for g.
struct Refinement {
  double f = 0.0;
  double g = 0.0;
};
Refinement memory_refinement(const CylinderPotential& coarse, const CylinderPotential& fine);

void check_beta(double beta);

/// Perron eigenvalue of the k-block matrix with entries exp(-s f_w + beta g_w),
/// by power iteration until the Collatz-Wielandt bounds agree to 1e-13.
double transfer_leading_eigenvalue(const CylinderPotential& pot, double s, double beta);

double pressure(const CylinderPotential& pot, double s, double beta);

/// (1/n) log sum over period-n points of exp(S_n(-s f + beta g)), assembled
/// from the primitive cycles of lengths dividing n.
double pressure_periodic(const OrbitDatabase& db, double s, double beta, int n);

struct RootResult {
  double s = 0.0;
  double pressure = 0.0;  // residual at s
  int evaluations = 0;
};

/// Root of a strictly decreasing function: bracket by doubling, then bisect
/// until |P| <= tol. Throws NumericalError on bracketing failure or when a
/// midpoint contradicts monotonicity.
RootResult decreasing_root(const std::function<double(double)>& P, double tol = 1e-10);

RootResult solve_abscissa(const CylinderPotential& pot, double beta);
RootResult solve_abscissa(const OrbitDatabase& db, double beta, int n);

struct Abscissas {
  double h = 0.0;   // beta = 0
  double a1 = 0.0;  // beta = 1/2
  double b1 = 0.0;  // beta = 1
};
Abscissas abscissas(const CylinderPotential& pot);
Abscissas abscissas(const OrbitDatabase& db, int n);

/// sign(b1) against sign(P(g)), with |.| < 1e-6 counted as zero.
struct SignReport {
  double b1 = 0.0;
  double pressure_g = 0.0;
  int sign_b1 = 0;
  int sign_pressure_g = 0;
  bool agree = false;
};
SignReport sign_check_b1(const CylinderPotential& pot);

/// Transfer matrix with the e^{i pi} twist on every transition, compared with
/// the untwisted one at real s.
struct TwistedReport {
  double lambda_untwisted = 0.0;
  double twisted_modulus = 0.0;       // spectral radius of the twisted matrix
  double twisted_distance_to_one = 0.0;  // min |mu - 1| over twisted eigenvalues
  double subdominant_modulus = 0.0;   // second largest |eigenvalue| untwisted
};
TwistedReport twisted_spectral_test(const CylinderPotential& pot, double s);

/// Dense transfer matrix, rows = source block.
std::vector<std::vector<double>> transfer_matrix(const CylinderPotential& pot, double s,
                                                 double beta);

}  // namespace bzeta::thermo
