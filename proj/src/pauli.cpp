#include "vagp/pauli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace vagp {

namespace {

constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int letter_index(char c) {
  switch (c) {
    case 'I': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
  }
}

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

// Single-site product p·q = i^quarter · letter.
struct SiteProduct {
  char letter;
  int quarter;
};

SiteProduct site_mul(char p, char q) {
  const int a = letter_index(p);
  const int b = letter_index(q);
  if (a == 0) return {q, 0};
  if (b == 0) return {p, 0};
  if (a == b) return {'I', 0};
  // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
  const int c = 6 - a - b;
  const bool cyclic = (b - a + 3) % 3 == 1;
  return {kLetters[c], cyclic ? 1 : 3};
}

bool anticommute(char p, char q) { return p != 'I' && q != 'I' && p != q; }

std::string strip(std::string s) {
  const auto first = s.find_first_not_of('I');
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of('I');
  return s.substr(first, last - first + 1);
}

// Letter-level product of `a` with `b` shifted by `offset`; returns the
// canonical letters and accumulates the phase as a power of i.
std::string product_letters(const std::string& a, const std::string& b, int offset, int& quarter) {
  const int la = static_cast<int>(a.size());
  const int lb = static_cast<int>(b.size());
  const int start = std::min(0, offset);
  const int stop = std::max(la, offset + lb);
  std::string out(static_cast<std::size_t>(stop - start), 'I');
  quarter = 0;
  for (int pos = start; pos < stop; ++pos) {
    const char p = (pos >= 0 && pos < la) ? a[pos] : 'I';
    const char q = (pos >= offset && pos < offset + lb) ? b[pos - offset] : 'I';
    const SiteProduct sp = site_mul(p, q);
    out[pos - start] = sp.letter;
    quarter += sp.quarter;
  }
  quarter &= 3;
  return strip(std::move(out));
}

}  // namespace

PauliWord::PauliWord(std::string l, Complex p) : letters(std::move(l)), phase(p) {
  for (char c : letters) letter_index(c);
}

int PauliWord::y_count() const {
  return static_cast<int>(std::count(letters.begin(), letters.end(), 'Y'));
}

void PauliWord::canonicalize() { letters = strip(std::move(letters)); }

bool is_canonical(std::string_view letters) {
  if (letters.empty()) return true;
  for (char c : letters) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') return false;
  }
  return letters.front() != 'I' && letters.back() != 'I';
}

PauliWord word_product(const PauliWord& a, const PauliWord& b, int offset) {
  int quarter = 0;
  std::string letters = product_letters(a.letters, b.letters, offset, quarter);
  PauliWord out;
  out.letters = std::move(letters);
  out.phase = a.phase * b.phase * kPowersOfI[quarter];
  return out;
}

// ---------------------------------------------------------------------------
// TransOp

TransOp::TransOp(std::string_view word, Complex coeff) { add(std::string(word), coeff); }

TransOp TransOp::parse(std::string_view expr) {
  TransOp op;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
  };
  bool expect_term = true;
  double sign = 1.0;
  while (true) {
    skip_ws();
    if (i >= expr.size()) {
      if (expect_term) throw std::invalid_argument("operator expression ends without a term: " + std::string(expr));
      break;
    }
    if (expr[i] == '+' || expr[i] == '-') {
      sign = expr[i] == '-' ? -sign : sign;
      ++i;
      expect_term = true;
      continue;
    }
    if (!expect_term) throw std::invalid_argument("malformed operator expression: " + std::string(expr));
    double value = 1.0;
    if (std::isdigit(static_cast<unsigned char>(expr[i])) || expr[i] == '.') {
      const auto res = std::from_chars(expr.data() + i, expr.data() + expr.size(), value);
      if (res.ec != std::errc()) throw std::invalid_argument("bad coefficient in: " + std::string(expr));
      i = static_cast<std::size_t>(res.ptr - expr.data());
      skip_ws();
      if (i < expr.size() && expr[i] == '*') ++i;
      skip_ws();
    }
    std::string word;
    while (i < expr.size() && std::isalpha(static_cast<unsigned char>(expr[i]))) word += expr[i++];
    if (word.empty()) throw std::invalid_argument("missing Pauli word in: " + std::string(expr));
    op.add(word, sign * value);
    sign = 1.0;
    expect_term = false;
  }
  return op.prune();
}

Complex TransOp::coeff(const std::string& word) const {
  const auto it = terms_.find(word);
  return it == terms_.end() ? Complex{} : it->second;
}

int TransOp::max_support() const {
  int m = 0;
  for (const auto& [w, c] : terms_) m = std::max(m, static_cast<int>(w.size()));
  return m;
}

void TransOp::add(std::string word, Complex c) {
  for (char ch : word) letter_index(ch);
  terms_[strip(std::move(word))] += c;
}

TransOp& TransOp::prune(double cutoff) {
  std::erase_if(terms_, [cutoff](const auto& kv) { return std::abs(kv.second) < cutoff; });
  return *this;
}

TransOp& TransOp::operator+=(const TransOp& other) {
  for (const auto& [w, c] : other.terms_) terms_[w] += c;
  return prune();
}

TransOp& TransOp::operator-=(const TransOp& other) {
  for (const auto& [w, c] : other.terms_) terms_[w] -= c;
  return prune();
}

TransOp& TransOp::operator*=(Complex s) {
  for (auto& [w, c] : terms_) c *= s;
  return prune();
}

TransOp TransOp::adjoint() const {
  TransOp out = *this;
  for (auto& [w, c] : out.terms_) c = std::conj(c);
  return out;
}

bool TransOp::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const auto& kv) { return std::abs(kv.second.imag()) <= tol; });
}

double TransOp::max_abs_diff(const TransOp& other) const {
  double m = 0.0;
  for (const auto& [w, c] : terms_) m = std::max(m, std::abs(c - other.coeff(w)));
  for (const auto& [w, c] : other.terms_) {
    if (!terms_.count(w)) m = std::max(m, std::abs(c));
  }
  return m;
}

TransOp operator+(TransOp a, const TransOp& b) { return a += b; }
TransOp operator-(TransOp a, const TransOp& b) { return a -= b; }
TransOp operator*(Complex s, TransOp a) { return a *= s; }
TransOp operator*(TransOp a, Complex s) { return a *= s; }

TransOp trans_commutator(const TransOp& a, const TransOp& b) {
  TransOp out;
  for (const auto& [wa, ca] : a.terms()) {
    const int la = static_cast<int>(wa.size());
    for (const auto& [wb, cb] : b.terms()) {
      const int lb = static_cast<int>(wb.size());
      // Words commute unless they overlap on an odd number of anticommuting sites.
      for (int offset = -(lb - 1); offset <= la - 1; ++offset) {
        int parity = 0;
        const int lo = std::max(0, offset);
        const int hi = std::min(la, offset + lb);
        for (int pos = lo; pos < hi; ++pos) parity ^= anticommute(wa[pos], wb[pos - offset]) ? 1 : 0;
        if (!parity) continue;
        int quarter = 0;
        std::string letters = product_letters(wa, wb, offset, quarter);
        out.add(std::move(letters), 2.0 * ca * cb * kPowersOfI[quarter]);
      }
    }
  }
  return out.prune();
}

Complex trans_inner(const TransOp& a, const TransOp& b) {
  Complex s{};
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [w, c] : small.terms()) {
    const auto it = large.terms().find(w);
    if (it == large.terms().end()) continue;
    s += &small == &a ? std::conj(c) * it->second : std::conj(it->second) * c;
  }
  return s;
}

TransOp build_hamiltonian(double h, double g) {
  TransOp H("ZZ", 1.0);
  if (h != 0.0) H.add("Z", h);
  if (g != 0.0) H.add("X", g);
  return H;
}

}  // namespace vagp
