#include "bzeta/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "bzeta/errors.hpp"

namespace bzeta::thermo {

namespace {

void admissible_words(int r, int len, Word& prefix, std::vector<Word>& out) {
  if (static_cast<int>(prefix.size()) == len) {
    out.push_back(prefix);
    return;
  }
  for (int a = 0; a < r; ++a) {
    if (!prefix.empty() && prefix.back() == a) continue;
    prefix.push_back(a);
    admissible_words(r, len, prefix, out);
    prefix.pop_back();
  }
}

std::vector<Word> admissible_words(int r, int len) {
  std::vector<Word> out;
  Word prefix;
  admissible_words(r, len, prefix, out);
  return out;
}

// Blocks and transitions without values.
CylinderPotential skeleton(int r, int k) {
  if (r < 2) throw ContractViolation("cylinder potentials need at least two symbols");
  if (k < 1) throw ContractViolation("memory must be >= 1");
  CylinderPotential pot;
  pot.alphabet = r;
  pot.memory = k;
  pot.blocks = admissible_words(r, k);
  std::map<Word, int> index;
  for (std::size_t i = 0; i < pot.blocks.size(); ++i) index[pot.blocks[i]] = static_cast<int>(i);
  for (auto& w : admissible_words(r, k + 1)) {
    Cylinder c;
    c.from = index.at(Word(w.begin(), w.end() - 1));
    c.to = index.at(Word(w.begin() + 1, w.end()));
    c.word = std::move(w);
    pot.cylinders.push_back(std::move(c));
  }
  return pot;
}

Eigen::MatrixXd dense(const CylinderPotential& pot, double s, double beta) {
  const auto n = static_cast<Eigen::Index>(pot.blocks.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : pot.cylinders) m(c.from, c.to) = std::exp(-s * c.f + beta * c.g);
  return m;
}

// Perron root of a nonnegative primitive matrix.
double perron(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd w = m * v;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double q = w[i] / v[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    if (!(hi > 0.0) || !std::isfinite(hi)) throw NumericalError("power iteration: degenerate matrix");
    if (hi - lo <= 1e-13 * hi) return 0.5 * (lo + hi);
    v = w / w.maxCoeff();
  }
  throw NumericalError("power iteration stagnated: Collatz-Wielandt bounds [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(),
            [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  return ev;
}

}  // namespace

CylinderPotential CylinderPotential::shifted(double df, double dg) const {
  CylinderPotential out = *this;
  for (auto& c : out.cylinders) {
    c.f += df;
    c.g += dg;
  }
  return out;
}

CylinderPotential CylinderPotential::constant(int r, int k, double f, double g) {
  CylinderPotential pot = skeleton(r, k);
  for (auto& c : pot.cylinders) {
    c.f = f;
    c.g = g;
  }
  return pot;
}

const Cylinder& CylinderPotential::at(const Word& w) const {
  for (const auto& c : cylinders) {
    if (c.word == w) return c;
  }
  throw ContractViolation("no cylinder for word " + symbolic::to_string(w));
}

int reference_flight(int k) { return k / 2; }

CylinderPotential build_potentials(const OrbitDatabase& db, int k) {
  CylinderPotential pot = skeleton(db.alphabet(), k);
  const int c = reference_flight(k);
  for (auto& cyl : pot.cylinders) {
    const Word& w = cyl.word;
    Word period = w.front() == w.back() ? Word(w.begin(), w.end() - 1) : w;
    const Word root = symbolic::primitive_root(period);
    const Word canon = symbolic::canonical_rotation(root);
    const std::size_t q = root.size();
    std::size_t shift = 0;
    while (shift < q && symbolic::rotate(canon, shift) != root) ++shift;
    const OrbitRecord* rec = db.find(canon);
    if (rec == nullptr) {
      throw IncompleteData("orbit database has no cycle " + symbolic::to_string(canon) +
                           " needed for cylinder " + symbolic::to_string(w));
    }
    // canon[(i + shift) % q] == root[i]
    const std::size_t pos = (static_cast<std::size_t>(c) % q + shift) % q;
    cyl.f = rec->orbit.flights[pos];
    cyl.g = -std::log1p(cyl.f * rec->curvature.kappa[pos]);
  }
  return pot;
}

Refinement memory_refinement(const CylinderPotential& coarse, const CylinderPotential& fine) {
  if (fine.memory != coarse.memory + 1 || fine.alphabet != coarse.alphabet) {
    throw ContractViolation("memory_refinement expects memories k and k+1");
  }
  const int offset = reference_flight(fine.memory) - reference_flight(coarse.memory);
  std::map<Word, const Cylinder*> by_word;
  for (const auto& c : coarse.cylinders) by_word[c.word] = &c;
  Refinement out;
  for (const auto& c : fine.cylinders) {
    const Word sub(c.word.begin() + offset, c.word.begin() + offset + coarse.memory + 1);
    const Cylinder* parent = by_word.at(sub);
    out.f = std::max(out.f, std::abs(c.f - parent->f));
    out.g = std::max(out.g, std::abs(c.g - parent->g));
  }
  return out;
}

void check_beta(double beta) {
  if (beta != 0.0 && beta != 0.5 && beta != 1.0) {
    throw ContractViolation("beta must be 0, 1/2 or 1");
  }
}

std::vector<std::vector<double>> transfer_matrix(const CylinderPotential& pot, double s,
                                                 double beta) {
  const Eigen::MatrixXd m = dense(pot, s, beta);
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

double transfer_leading_eigenvalue(const CylinderPotential& pot, double s, double beta) {
  check_beta(beta);
  return perron(dense(pot, s, beta));
}

double pressure(const CylinderPotential& pot, double s, double beta) {
  return std::log(transfer_leading_eigenvalue(pot, s, beta));
}

double pressure_periodic(const OrbitDatabase& db, double s, double beta, int n) {
  check_beta(beta);
  if (n < 2) throw ContractViolation("pressure_periodic: n must be >= 2");
  if (n > db.n_max()) {
    throw IncompleteData("pressure_periodic: period " + std::to_string(n) +
                         " exceeds orbit database length " + std::to_string(db.n_max()));
  }
  // Log-sum-exp in database order.
  std::vector<double> terms;
  for (const auto& rec : db.records()) {
    const int np = rec.reflections();
    if (n % np != 0) continue;
    const int rep = n / np;
    terms.push_back(std::log(static_cast<double>(np)) +
                    rep * (-s * rec.period() - beta * rec.stability.d_gamma));
  }
  if (terms.empty()) throw IncompleteData("pressure_periodic: no periodic points");
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return (top + std::log(sum)) / n;
}

RootResult decreasing_root(const std::function<double(double)>& P, double tol) {
  RootResult res;
  auto eval = [&](double s) {
    ++res.evaluations;
    return P(s);
  };
  double lo = -1.0, hi = 1.0;
  double plo = eval(lo), phi = eval(hi);
  for (int i = 0; plo < 0.0; ++i) {
    if (i == 60) throw NumericalError("abscissa: no lower bracket");
    hi = lo;
    phi = plo;
    lo *= 2.0;
    plo = eval(lo);
  }
  for (int i = 0; phi > 0.0; ++i) {
    if (i == 60) throw NumericalError("abscissa: no upper bracket");
    lo = hi;
    plo = phi;
    hi *= 2.0;
    phi = eval(hi);
  }
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    const double pm = eval(mid);
    if (std::abs(pm) <= tol || mid == lo || mid == hi) {
      res.s = mid;
      res.pressure = pm;
      return res;
    }
    if (pm > plo || pm < phi) throw NumericalError("abscissa: pressure is not decreasing in s");
    if (pm > 0.0) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
      phi = pm;
    }
  }
}

RootResult solve_abscissa(const CylinderPotential& pot, double beta) {
  check_beta(beta);
  return decreasing_root([&](double s) { return pressure(pot, s, beta); });
}

RootResult solve_abscissa(const OrbitDatabase& db, double beta, int n) {
  check_beta(beta);
  return decreasing_root([&](double s) { return pressure_periodic(db, s, beta, n); });
}

Abscissas abscissas(const CylinderPotential& pot) {
  return {solve_abscissa(pot, 0.0).s, solve_abscissa(pot, 0.5).s, solve_abscissa(pot, 1.0).s};
}

Abscissas abscissas(const OrbitDatabase& db, int n) {
  return {solve_abscissa(db, 0.0, n).s, solve_abscissa(db, 0.5, n).s,
          solve_abscissa(db, 1.0, n).s};
}

SignReport sign_check_b1(const CylinderPotential& pot) {
  auto sign = [](double x) { return std::abs(x) < 1e-6 ? 0 : (x > 0.0 ? 1 : -1); };
  SignReport rep;
  rep.b1 = solve_abscissa(pot, 1.0).s;
  rep.pressure_g = pressure(pot, 0.0, 1.0);
  rep.sign_b1 = sign(rep.b1);
  rep.sign_pressure_g = sign(rep.pressure_g);
  rep.agree = rep.sign_b1 == rep.sign_pressure_g;
  return rep;
}

TwistedReport twisted_spectral_test(const CylinderPotential& pot, double s) {
  const Eigen::MatrixXd m = dense(pot, s, 1.0);
  const Eigen::MatrixXd twisted = -m;  // e^{i pi} on every transition
  TwistedReport rep;
  rep.lambda_untwisted = perron(m);
  // T^2 is nonnegative, so its Perron root is the squared spectral radius.
  rep.twisted_modulus = std::sqrt(perron(twisted * twisted));
  const auto tw = spectrum(twisted);
  rep.twisted_distance_to_one = std::numeric_limits<double>::infinity();
  for (const auto& mu : tw) {
    rep.twisted_distance_to_one = std::min(rep.twisted_distance_to_one, std::abs(mu - 1.0));
  }
  const auto un = spectrum(m);
  rep.subdominant_modulus = un.size() > 1 ? std::abs(un[1]) : 0.0;
  return rep;
}

}  // namespace bzeta::thermo
