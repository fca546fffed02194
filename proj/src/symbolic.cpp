#include "bzeta/symbolic.hpp"

#include <algorithm>

#include "bzeta/errors.hpp"

namespace bzeta::symbolic {

namespace {

constexpr const char* kAlphabet = "123456789abcdefghijklmnopqrstuvwxyz";
constexpr int kAlphabetSize = 35;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t p = 1;
  while (e-- > 0) p *= b;
  return p;
}

int moebius(int n) {
  int mu = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

// Compares rotation by `shift` with the identity rotation; returns <0, 0, >0.
int compare_rotation(const Word& w, std::size_t shift) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int a = w[(i + shift) % n], b = w[i];
    if (a != b) return a < b ? -1 : 1;
  }
  return 0;
}

}  // namespace

TransitionMatrix::TransitionMatrix(int r) : r_(r) {
  if (r < 2) throw ContractViolation("transition matrix needs r >= 2");
}

bool is_admissible(const Word& w, int r) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= r) return false;
    if (i > 0 && w[i] == w[i - 1]) return false;
  }
  return true;
}

bool is_cyclically_admissible(const Word& w, int r) {
  return w.size() >= 2 && is_admissible(w, r) && w.front() != w.back();
}

bool is_primitive(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d == 0 && compare_rotation(w, d) == 0) return false;
  }
  return n > 0;
}

Word rotate(const Word& w, std::size_t shift) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[(i + shift) % w.size()];
  return out;
}

Word canonical_rotation(const Word& w) {
  Word best = w;
  for (std::size_t s = 1; s < w.size(); ++s) {
    Word cand = rotate(w, s);
    if (cand < best) best = std::move(cand);
  }
  return best;
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d == 0 && compare_rotation(w, d) == 0) return Word(w.begin(), w.begin() + d);
  }
  return w;
}

std::string to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (int c : w) {
    if (c < 0 || c >= kAlphabetSize) throw ContractViolation("symbol outside serializable range");
    s.push_back(kAlphabet[c]);
  }
  return s;
}

Word parse_word(const std::string& s) {
  Word w;
  w.reserve(s.size());
  const std::string alphabet(kAlphabet);
  for (char c : s) {
    const auto pos = alphabet.find(c);
    if (pos == std::string::npos) throw MalformedInput("invalid symbol in word: " + s);
    w.push_back(static_cast<int>(pos));
  }
  return w;
}

Cycle Cycle::from_word(const Word& w, int r) {
  if (!is_cyclically_admissible(w, r)) {
    throw ContractViolation("cycle word is not cyclically admissible: " + to_string(w));
  }
  if (!is_primitive(w)) throw ContractViolation("cycle word is not primitive: " + to_string(w));
  return Cycle(canonical_rotation(w));
}

Cycle Cycle::reversed(int r) const {
  Word w(word_.rbegin(), word_.rend());
  return from_word(w, r);
}

bool Cycle::operator<(const Cycle& o) const {
  if (word_.size() != o.word_.size()) return word_.size() < o.word_.size();
  return word_ < o.word_;
}

std::int64_t count_periodic_points(int r, int n) {
  if (r < 2 || n < 1) throw ContractViolation("count_periodic_points needs r >= 2, n >= 1");
  const std::int64_t sign = (n % 2 == 0) ? 1 : -1;
  return ipow(r - 1, n) + (r - 1) * sign;
}

std::int64_t count_primitive_classes(int r, int n) {
  std::int64_t total = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0) total += moebius(d) * count_periodic_points(r, n / d);
  }
  return total / n;
}

void for_each_cycle(int r, int n, const std::function<void(const Word&)>& visit) {
  if (n < 2) return;
  Word w(static_cast<std::size_t>(n));
  // A canonical word starts with its smallest symbol, so later symbols never
  // go below w[0].
  std::function<void(int)> extend = [&](int pos) {
    if (pos == n) {
      if (w.back() == w.front()) return;
      for (int s = 1; s < n; ++s) {
        if (compare_rotation(w, static_cast<std::size_t>(s)) <= 0) return;
      }
      visit(w);
      return;
    }
    for (int c = w[0]; c < r; ++c) {
      if (c == w[static_cast<std::size_t>(pos - 1)]) continue;
      w[static_cast<std::size_t>(pos)] = c;
      extend(pos + 1);
    }
  };
  for (int first = 0; first < r; ++first) {
    w[0] = first;
    extend(1);
  }
}

std::vector<std::vector<Cycle>> enumerate_cycles(int r, int n_max) {
  if (n_max < 2) throw ContractViolation("enumerate_cycles needs n_max >= 2");
  TransitionMatrix{r};
  std::vector<std::vector<Cycle>> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 2; n <= n_max; ++n) {
    for_each_cycle(r, n, [&](const Word& w) { out[n].push_back(Cycle::from_word(w, r)); });
  }
  return out;
}

}  // namespace bzeta::symbolic
