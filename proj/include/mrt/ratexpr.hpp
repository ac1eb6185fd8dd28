#pragma once

#include <set>
#include <utility>

#include "mrt/poly.hpp"

namespace mrt {

/// Rational function in jet variables: num/den with den never zero.
///
/// Normal form: the integer content of num and den is reduced jointly, the
/// leading coefficient of den is positive, and monomial factors common to all
/// terms of num and den are cancelled. No polynomial gcd beyond that is taken,
/// so equality of values is decided by `is_zero(a - b)`, not by `==`.
class RatExpr {
 public:
  RatExpr() : den_(1) {}
  RatExpr(long c) : num_(c), den_(1) {}                // NOLINT(google-explicit-constructor)
  RatExpr(const Rational& c) : num_(c.get_num()), den_(c.get_den()) {}  // NOLINT(google-explicit-constructor)
  RatExpr(const Jet& j) : num_(j), den_(1) {}          // NOLINT(google-explicit-constructor)
  RatExpr(DiffPoly p) : num_(std::move(p)), den_(1) {  // NOLINT(google-explicit-constructor)
    normalize();
  }
  RatExpr(DiffPoly num, DiffPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("division by an identically zero expression");
    normalize();
  }

  const DiffPoly& num() const { return num_; }
  const DiffPoly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  std::size_t term_count() const { return num_.size() + den_.size(); }

  std::set<Jet> jets() const {
    std::set<Jet> s;
    num_.collect_jets(s);
    den_.collect_jets(s);
    return s;
  }

  /// Structural equality of normal forms.
  bool operator==(const RatExpr& o) const { return num_ == o.num_ && den_ == o.den_; }

  friend RatExpr operator+(const RatExpr& a, const RatExpr& b) { return combine_sum(a, b, false); }
  friend RatExpr operator-(const RatExpr& a, const RatExpr& b) { return combine_sum(a, b, true); }
  friend RatExpr operator-(const RatExpr& a) {
    RatExpr r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RatExpr operator*(const RatExpr& a, const RatExpr& b) {
    if (a.is_zero() || b.is_zero()) return RatExpr();
    return RatExpr(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatExpr operator/(const RatExpr& a, const RatExpr& b) {
    if (b.is_zero()) throw DomainError("division by an identically zero expression");
    return RatExpr(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatExpr& operator+=(const RatExpr& o) { return *this = *this + o; }
  RatExpr& operator-=(const RatExpr& o) { return *this = *this - o; }
  RatExpr& operator*=(const RatExpr& o) { return *this = *this * o; }
  RatExpr& operator/=(const RatExpr& o) { return *this = *this / o; }

  RatExpr pow(long e) const {
    if (e == 0) return RatExpr(1);
    if (is_zero()) {
      if (e < 0) throw DomainError("zero raised to a negative power");
      return RatExpr();
    }
    RatExpr r;
    auto k = static_cast<unsigned>(e < 0 ? -e : e);
    if (e > 0) {
      r.num_ = num_.pow(k);
      r.den_ = den_.pow(k);
    } else {
      r.num_ = den_.pow(k);
      r.den_ = num_.pow(k);
    }
    r.normalize();
    return r;
  }

  /// Normalizes in place; idempotent.
  void normalize();

 private:
  static RatExpr combine_sum(const RatExpr& a, const RatExpr& b, bool subtract);

  DiffPoly num_;
  DiffPoly den_;
};

namespace detail {

inline Integer lcm_of_denominators(const DiffPoly& p, Integer acc) {
  for (auto& [m, c] : p.terms()) acc = lcm(acc, Integer(c.get_den()));
  return acc;
}

// Splits p into (monomial content, p / content).
inline std::pair<Monomial, DiffPoly> split_monomial(const DiffPoly& p) {
  Monomial g = p.monomial_content();
  return {g, p.divided_by(g)};
}

}  // namespace detail

inline void RatExpr::normalize() {
  if (den_.is_zero()) throw DomainError("division by an identically zero expression");
  if (num_.is_zero()) {
    den_ = DiffPoly(1);
    return;
  }
  // joint monomial content
  Monomial g = Monomial::gcd(num_.monomial_content(), den_.monomial_content());
  if (!g.is_one()) {
    num_ = num_.divided_by(g);
    den_ = den_.divided_by(g);
  }
  // joint integer content: scale by lcm of denominators, then by the gcd of the results
  Rational scale(detail::lcm_of_denominators(den_, detail::lcm_of_denominators(num_, Integer(1))));
  Integer g_int = 0;
  for (const DiffPoly* p : {&num_, &den_})
    for (auto& [m, cc] : p->terms()) {
      Rational v = cc * scale;
      g_int = gcd(g_int, Integer(v.get_num()));
    }
  scale /= Rational(g_int);
  if (den_.leading().second < 0) scale = -scale;
  if (scale != 1) {
    num_ = num_.scaled(scale);
    den_ = den_.scaled(scale);
  }
}

inline RatExpr RatExpr::combine_sum(const RatExpr& a, const RatExpr& b, bool subtract) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return subtract ? -b : b;
  DiffPoly bn = subtract ? -b.num_ : b.num_;
  if (a.den_ == b.den_) return RatExpr(a.num_ + bn, a.den_);
  // denominators that differ only by a monomial and a scalar share their remaining factor
  auto [ma, ra] = detail::split_monomial(a.den_);
  auto [mb, rb] = detail::split_monomial(b.den_);
  if (ra.size() == rb.size()) {
    const auto& [la_m, la_c] = ra.leading();
    const auto& [lb_m, lb_c] = rb.leading();
    if (la_m == lb_m && ra.scaled(lb_c / la_c) == rb) {
      // a.den = ma*ra, b.den = mb*ra*k with k = lb_c/la_c
      Rational k = lb_c / la_c;
      Monomial l = Monomial::lcm(ma, mb);
      DiffPoly na = a.num_.scaled(Rational(1), ma.quotient_of(l));
      DiffPoly nb = bn.scaled(Rational(1) / k, mb.quotient_of(l));
      return RatExpr(na + nb, ra.scaled(Rational(1), l));
    }
  }
  return RatExpr(a.num_ * b.den_ + bn * a.den_, a.den_ * b.den_);
}

inline RatExpr pow(const RatExpr& e, long k) { return e.pow(k); }

}  // namespace mrt
