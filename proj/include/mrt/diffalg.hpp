#pragma once

// Differential algebra on rational expressions: total derivatives, zero and
// proportionality tests, and jet substitution.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mrt/ratexpr.hpp"

namespace mrt {

enum class CombineKind { add, sub, mul, div, pow };

inline RatExpr combine(CombineKind kind, const RatExpr& a, const RatExpr& b) {
  switch (kind) {
    case CombineKind::add: return a + b;
    case CombineKind::sub: return a - b;
    case CombineKind::mul: return a * b;
    case CombineKind::div: return a / b;
    case CombineKind::pow:
      if (!b.is_constant() || b.num().constant_value().get_den() != 1 || b.den().constant_value() != 1)
        throw DomainError("exponent must be an integer");
      return a.pow(b.num().constant_value().get_num().get_si());
  }
  throw DomainError("unknown combine kind");
}

/// Spaces of every jet in `e`.
inline std::set<SpaceId> spaces_of(const RatExpr& e) {
  std::set<SpaceId> s;
  for (const auto& j : e.jets()) s.insert(j.space());
  return s;
}

/// Total derivative along `v`. All jets of `e` must live on v's space.
inline RatExpr total_derivative(const RatExpr& e, Var v) {
  for (const auto& j : e.jets())
    if (j.space() != v.space)
      throw DomainError("total derivative along " + v.name() + " of an expression with jets on space " +
                        std::string(space_name(j.space())));
  DiffPoly dn = derivative(e.num(), v.space, v.index);
  if (e.den().is_constant()) return RatExpr(std::move(dn), e.den());
  DiffPoly dd = derivative(e.den(), v.space, v.index);
  return RatExpr(dn * e.den() - e.num() * dd, e.den() * e.den());
}

inline bool is_zero(const RatExpr& e) { return e.is_zero(); }

namespace detail {

// p = sign * content * monomial * primitive, primitive with positive leading coefficient
struct PolyParts {
  Rational content;
  Monomial mono;
  DiffPoly primitive;
};

inline PolyParts poly_parts(const DiffPoly& p) {
  Monomial m = p.monomial_content();
  DiffPoly q = p.divided_by(m);
  Integer l = 1;
  for (auto& [mm, c] : q.terms()) l = lcm(l, Integer(c.get_den()));
  Integer g = 0;
  for (auto& [mm, c] : q.terms()) g = gcd(g, Integer(Rational(c * Rational(l)).get_num()));
  Rational content = Rational(g) / Rational(l);
  if (q.leading().second < 0) content = -content;
  return {content, m, q.scaled(Rational(1) / content)};
}

}  // namespace detail

/// If a = c*b with c a rational times a Laurent monomial, returns c.
///
/// When a and b are both single monomials any two of them would qualify, so
/// in that case only a rational cofactor is accepted.
inline std::optional<RatExpr> proportional(const RatExpr& a, const RatExpr& b) {
  if (a.is_zero() || b.is_zero()) throw DomainError("proportional() requires nonzero arguments");
  auto na = detail::poly_parts(a.num()), da = detail::poly_parts(a.den());
  auto nb = detail::poly_parts(b.num()), db = detail::poly_parts(b.den());
  // a/b = (na*db)/(da*nb)
  DiffPoly left = na.primitive * db.primitive;
  DiffPoly right = da.primitive * nb.primitive;
  if (!(left == right)) return std::nullopt;
  Rational c = na.content * db.content / (da.content * nb.content);
  Monomial up = na.mono * db.mono, down = da.mono * nb.mono;
  if (left.is_constant() && !(up == down)) return std::nullopt;
  return RatExpr(DiffPoly(up, c)) / RatExpr(DiffPoly(down, Rational(1)));
}

/// Replaces jets by expressions. `image` returns the replacement for a jet, or
/// nothing to keep the jet as is. Denominators of the images are combined per
/// polynomial so that no intermediate fractions are summed.
class JetSubstitution {
 public:
  using ImageFn = std::function<std::optional<RatExpr>(const Jet&)>;

  explicit JetSubstitution(ImageFn image) : image_(std::move(image)) {}

  RatExpr operator()(const RatExpr& e) {
    if (e.is_zero()) return e;
    auto [nn, nd] = apply(e.num());
    if (e.den().is_constant()) return RatExpr(std::move(nn), nd * e.den());
    auto [dn, dd] = apply(e.den());
    return RatExpr(nn * dd, nd * dn);
  }

  /// The polynomial with images substituted, as a (numerator, denominator) pair.
  std::pair<DiffPoly, DiffPoly> apply(const DiffPoly& p) {
    std::map<Jet, std::uint32_t> maxdeg;
    for (auto& [m, c] : p.terms())
      for (auto& [j, e] : m.factors()) {
        auto& d = maxdeg[j];
        d = std::max(d, e);
      }
    DiffPoly common(1);
    std::vector<std::pair<Jet, std::uint32_t>> imaged;
    for (auto& [j, d] : maxdeg)
      if (entry(j).image && !entry(j).image->den().is_constant()) common = common * den_power(j, d);
    for (auto& [j, d] : maxdeg)
      if (entry(j).image) imaged.emplace_back(j, d);
    DiffPoly out;
    for (auto& [m, c] : p.terms()) {
      DiffPoly term(Monomial{}, c);
      Monomial kept;
      for (auto& [j, d] : imaged) {
        std::uint32_t e = m.degree(j);
        if (e > 0) term = term * num_power(j, e);
        if (d > e && !entry(j).image->den().is_constant()) term = term * den_power(j, d - e);
        else if (e > 0 && entry(j).image->den().is_constant()) term = term.scaled(Rational(1) / pow_const(j, e), Monomial{});
      }
      for (auto& [j, e] : m.factors())
        if (!entry(j).image) kept = kept * Monomial(j, e);
      out += term.scaled(Rational(1), kept);
    }
    return {std::move(out), std::move(common)};
  }

 private:
  struct Entry {
    std::optional<RatExpr> image;
    std::vector<DiffPoly> num_pows;
    std::vector<DiffPoly> den_pows;
  };

  Entry& entry(const Jet& j) {
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
    Entry en;
    en.image = image_(j);
    return cache_.emplace(j, std::move(en)).first->second;
  }

  static const DiffPoly& power(std::vector<DiffPoly>& pows, const DiffPoly& base, std::uint32_t k) {
    if (pows.empty()) pows.emplace_back(1);
    while (pows.size() <= k) pows.push_back(pows.back() * base);
    return pows[k];
  }
  const DiffPoly& num_power(const Jet& j, std::uint32_t k) {
    Entry& en = entry(j);
    return power(en.num_pows, en.image->num(), k);
  }
  Rational pow_const(const Jet& j, std::uint32_t k) {
    Rational base = entry(j).image->den().constant_value(), r = 1;
    for (std::uint32_t i = 0; i < k; ++i) r *= base;
    return r;
  }
  const DiffPoly& den_power(const Jet& j, std::uint32_t k) {
    Entry& en = entry(j);
    return power(en.den_pows, en.image->den(), k);
  }

  ImageFn image_;
  std::map<Jet, Entry> cache_;
};

inline RatExpr substitute(const RatExpr& e, JetSubstitution::ImageFn image) {
  JetSubstitution s(std::move(image));
  return s(e);
}

/// Replaces a single jet.
inline RatExpr substitute(const RatExpr& e, const Jet& j, const RatExpr& replacement) {
  return substitute(e, [&](const Jet& k) -> std::optional<RatExpr> {
    if (k == j) return replacement;
    return std::nullopt;
  });
}

}  // namespace mrt
