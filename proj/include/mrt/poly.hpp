#pragma once

// Differential polynomials: exact rational linear combinations of monomials in
// jet variables.

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mrt/errors.hpp"
#include "mrt/jet.hpp"

namespace mrt {

using Rational = mpq_class;
using Integer = mpz_class;

inline constexpr std::size_t kDefaultTermCap = 200000;

namespace detail {
inline std::atomic<std::size_t>& term_cap_storage() {
  static std::atomic<std::size_t> cap{kDefaultTermCap};
  return cap;
}
}  // namespace detail

inline std::size_t term_cap() { return detail::term_cap_storage().load(std::memory_order_relaxed); }
inline void set_term_cap(std::size_t cap) { detail::term_cap_storage().store(cap, std::memory_order_relaxed); }

/// Restores the previous term cap on scope exit.
class ScopedTermCap {
 public:
  explicit ScopedTermCap(std::size_t cap) : saved_(term_cap()) { set_term_cap(cap); }
  ~ScopedTermCap() { set_term_cap(saved_); }
  ScopedTermCap(const ScopedTermCap&) = delete;
  ScopedTermCap& operator=(const ScopedTermCap&) = delete;

 private:
  std::size_t saved_;
};

/// Product of jet powers, factors sorted by the canonical jet order.
class Monomial {
 public:
  using Factor = std::pair<Jet, std::uint32_t>;

  Monomial() = default;
  explicit Monomial(const Jet& j, std::uint32_t e = 1) {
    if (e > 0) f_.emplace_back(j, e);
  }

  const std::vector<Factor>& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }

  std::uint32_t degree(const Jet& j) const {
    auto it = std::lower_bound(f_.begin(), f_.end(), j, [](const Factor& a, const Jet& b) { return a.first < b; });
    return it != f_.end() && it->first == j ? it->second : 0;
  }

  std::uint32_t total_degree() const {
    std::uint32_t s = 0;
    for (auto& [j, e] : f_) s += e;
    return s;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f_.reserve(a.f_.size() + b.f_.size());
    auto i = a.f_.begin(), j = b.f_.begin();
    while (i != a.f_.end() && j != b.f_.end()) {
      if (i->first < j->first) {
        r.f_.push_back(*i++);
      } else if (j->first < i->first) {
        r.f_.push_back(*j++);
      } else {
        r.f_.emplace_back(i->first, i->second + j->second);
        ++i, ++j;
      }
    }
    r.f_.insert(r.f_.end(), i, a.f_.end());
    r.f_.insert(r.f_.end(), j, b.f_.end());
    return r;
  }

  bool divides(const Monomial& b) const {
    auto j = b.f_.begin();
    for (auto& [jet, e] : f_) {
      while (j != b.f_.end() && j->first < jet) ++j;
      if (j == b.f_.end() || j->first != jet || j->second < e) return false;
    }
    return true;
  }

  /// b / this; requires divides(b).
  Monomial quotient_of(const Monomial& b) const {
    Monomial r;
    auto i = f_.begin();
    for (auto& [jet, e] : b.f_) {
      while (i != f_.end() && i->first < jet) ++i;
      std::uint32_t sub = (i != f_.end() && i->first == jet) ? i->second : 0;
      if (e > sub) r.f_.emplace_back(jet, e - sub);
    }
    return r;
  }

  /// The monomial with `j` removed entirely.
  Monomial without(const Jet& j) const {
    Monomial r;
    for (auto& fac : f_)
      if (fac.first != j) r.f_.push_back(fac);
    return r;
  }

  /// Componentwise minimum of exponents.
  static Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto i = a.f_.begin(), j = b.f_.begin();
    while (i != a.f_.end() && j != b.f_.end()) {
      if (i->first < j->first) {
        ++i;
      } else if (j->first < i->first) {
        ++j;
      } else {
        r.f_.emplace_back(i->first, std::min(i->second, j->second));
        ++i, ++j;
      }
    }
    return r;
  }

  static Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto i = a.f_.begin(), j = b.f_.begin();
    while (i != a.f_.end() && j != b.f_.end()) {
      if (i->first < j->first) {
        r.f_.push_back(*i++);
      } else if (j->first < i->first) {
        r.f_.push_back(*j++);
      } else {
        r.f_.emplace_back(i->first, std::max(i->second, j->second));
        ++i, ++j;
      }
    }
    r.f_.insert(r.f_.end(), i, a.f_.end());
    r.f_.insert(r.f_.end(), j, b.f_.end());
    return r;
  }

  bool operator==(const Monomial&) const = default;

  /// Lexicographic monomial order with jets as indeterminates, larger jets
  /// dominating. Compatible with multiplication.
  static int compare(const Monomial& a, const Monomial& b) {
    auto i = a.f_.rbegin(), j = b.f_.rbegin();
    for (; i != a.f_.rend() && j != b.f_.rend(); ++i, ++j) {
      if (i->first != j->first) return i->first < j->first ? -1 : 1;
      if (i->second != j->second) return i->second < j->second ? -1 : 1;
    }
    if (i != a.f_.rend()) return 1;
    if (j != b.f_.rend()) return -1;
    return 0;
  }

 private:
  std::vector<Factor> f_;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return Monomial::compare(a, b) < 0; }
};

/// Sparse polynomial; zero coefficients are never stored.
class DiffPoly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  DiffPoly() = default;
  DiffPoly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) t_.emplace(Monomial{}, c);
  }
  DiffPoly(long c) : DiffPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  explicit DiffPoly(const Jet& j) { t_.emplace(Monomial(j), Rational(1)); }
  DiffPoly(const Monomial& m, const Rational& c) {
    if (c != 0) t_.emplace(m, c);
  }

  const Terms& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }
  bool is_zero() const { return t_.empty(); }

  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }
  Rational constant_value() const {
    auto it = t_.find(Monomial{});
    return it == t_.end() ? Rational(0) : it->second;
  }

  bool is_monomial() const { return t_.size() == 1; }

  /// Leading term under the monomial order; requires !is_zero().
  const Terms::value_type& leading() const { return *t_.rbegin(); }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = t_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }

  DiffPoly& operator+=(const DiffPoly& o) {
    for (auto& [m, c] : o.t_) add_term(m, c);
    guard();
    return *this;
  }
  DiffPoly& operator-=(const DiffPoly& o) {
    for (auto& [m, c] : o.t_) add_term(m, -c);
    guard();
    return *this;
  }

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator-(DiffPoly a) {
    for (auto& [m, c] : a.t_) c = -c;
    return a;
  }

  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    if (a.t_.size() * b.t_.size() > 64 * term_cap())
      throw SwellError("product of " + std::to_string(a.size()) + " x " + std::to_string(b.size()) +
                       " terms exceeds the term cap");
    for (auto& [ma, ca] : a.t_)
      for (auto& [mb, cb] : b.t_) r.add_term(ma * mb, ca * cb);
    r.guard();
    return r;
  }

  DiffPoly scaled(const Rational& c, const Monomial& m = Monomial{}) const {
    DiffPoly r;
    if (c == 0) return r;
    for (auto& [mm, cc] : t_) r.t_.emplace_hint(r.t_.end(), mm * m, cc * c);
    return r;
  }

  DiffPoly pow(unsigned e) const {
    DiffPoly result(1), base = *this;
    while (e) {
      if (e & 1U) result = result * base;
      e >>= 1U;
      if (e) base = base * base;
    }
    return result;
  }

  bool operator==(const DiffPoly& o) const {
    if (t_.size() != o.t_.size()) return false;
    auto i = t_.begin();
    for (auto j = o.t_.begin(); j != o.t_.end(); ++i, ++j)
      if (!(i->first == j->first) || i->second != j->second) return false;
    return true;
  }

  std::set<Jet> jets() const {
    std::set<Jet> s;
    collect_jets(s);
    return s;
  }
  void collect_jets(std::set<Jet>& s) const {
    for (auto& [m, c] : t_)
      for (auto& [j, e] : m.factors()) s.insert(j);
  }

  std::uint32_t degree(const Jet& j) const {
    std::uint32_t d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.degree(j));
    return d;
  }

  /// Coefficients of powers of `j`: result[k] is the coefficient of j^k.
  std::vector<DiffPoly> coefficients_in(const Jet& j) const {
    std::vector<DiffPoly> out(degree(j) + 1);
    for (auto& [m, c] : t_) out[m.degree(j)].add_term(m.without(j), c);
    return out;
  }

  /// Gcd of all monomials (the largest monomial dividing every term).
  Monomial monomial_content() const {
    if (t_.empty()) return {};
    Monomial g = t_.begin()->first;
    for (auto& [m, c] : t_) {
      g = Monomial::gcd(g, m);
      if (g.is_one()) break;
    }
    return g;
  }

  /// Every term divided by the monomial `m`; requires m to divide every term.
  DiffPoly divided_by(const Monomial& m) const {
    if (m.is_one()) return *this;
    DiffPoly r;
    for (auto& [mm, c] : t_) r.t_.emplace_hint(r.t_.end(), m.quotient_of(mm), c);
    return r;
  }

  /// Exact division by `b`; empty if the remainder is nonzero.
  std::optional<DiffPoly> divide_exact(const DiffPoly& b) const {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    DiffPoly rem = *this, quo;
    const auto& [lm, lc] = b.leading();
    while (!rem.is_zero()) {
      const auto& [rm, rc] = rem.leading();
      if (!lm.divides(rm)) return std::nullopt;
      Monomial qm = lm.quotient_of(rm);
      Rational qc = rc / lc;
      quo.add_term(qm, qc);
      rem -= b.scaled(qc, qm);
    }
    return quo;
  }

  void guard() const {
    if (t_.size() > term_cap())
      throw SwellError("expression has " + std::to_string(t_.size()) + " terms, above the cap of " +
                       std::to_string(term_cap()));
  }

 private:
  Terms t_;
};

/// The total derivative of a polynomial along variable index `v` of `space`.
inline DiffPoly derivative(const DiffPoly& p, SpaceId space, int v) {
  DiffPoly r;
  for (auto& [m, c] : p.terms()) {
    const auto& fs = m.factors();
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& [j, e] = fs[k];
      if (j.space() != space)
        throw DomainError("total derivative along " + var_name(space, v) + " of a jet on space " +
                          std::string(space_name(j.space())));
      Monomial rest = e > 1 ? m.without(j) * Monomial(j, e - 1) : m.without(j);
      r.add_term(rest * Monomial(j.derivative(v)), c * static_cast<unsigned long>(e));
    }
  }
  r.guard();
  return r;
}

}  // namespace mrt
