#pragma once

// Symbolic dynamics on the full shift with forbidden repetitions: obstacle
// labels 0..r-1 in code, written 1..r (then a, b, ...) in serialized words.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bzeta::symbolic {

/// A(i,j) = 1 iff i != j.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int r);
  int size() const { return r_; }
  int operator()(int i, int j) const { return i != j ? 1 : 0; }

 private:
  int r_;
};

using Word = std::vector<int>;

/// Adjacent symbols differ (open word).
bool is_admissible(const Word& w, int r);
/// Admissible and last symbol differs from the first.
bool is_cyclically_admissible(const Word& w, int r);
/// True iff the word has no proper divisor period.
bool is_primitive(const Word& w);
/// Lexicographically minimal rotation.
Word canonical_rotation(const Word& w);
/// Rotation left by `shift` positions: result[i] = w[(i + shift) % n].
Word rotate(const Word& w, std::size_t shift);
/// Shortest u with w = u^p.
Word primitive_root(const Word& w);

std::string to_string(const Word& w);
/// Parses "1213"; throws MalformedInput on characters outside the alphabet.
Word parse_word(const std::string& s);

/// Primitive, cyclically admissible word held in canonical rotation.
class Cycle {
 public:
  /// Canonicalizes; throws ContractViolation if `w` is not cyclically
  /// admissible over r symbols or not primitive.
  static Cycle from_word(const Word& w, int r);
  Cycle() = default;

  const Word& word() const { return word_; }
  int length() const { return static_cast<int>(word_.size()); }
  std::string str() const { return to_string(word_); }
  /// The same geometric ray traversed backwards.
  Cycle reversed(int r) const;

  bool operator==(const Cycle& o) const { return word_ == o.word_; }
  bool operator<(const Cycle& o) const;

 private:
  explicit Cycle(Word w) : word_(std::move(w)) {}
  Word word_;
};

/// trace(A^n) = (r-1)^n + (r-1)(-1)^n.
std::int64_t count_periodic_points(int r, int n);

/// Visits one canonical representative of every primitive class of length
/// exactly n, in lexicographic order.
void for_each_cycle(int r, int n, const std::function<void(const Word&)>& visit);

/// All primitive cycle classes of length 2..n_max. Element [n] holds length n
/// (entries 0 and 1 are empty).
std::vector<std::vector<Cycle>> enumerate_cycles(int r, int n_max);

/// Number of primitive classes of length n by Moebius inversion of trace(A^n).
std::int64_t count_primitive_classes(int r, int n);

}  // namespace bzeta::symbolic
