#pragma once

// Seeded random generators for property tests.

#include <random>

#include "mrt/mrt.hpp"

namespace gen {

using mrt::Jet;
using mrt::RatExpr;
using mrt::Rational;
using mrt::VarSpace;

struct Config {
  int max_terms = 3;
  int max_factors = 2;
  int max_order = 2;
  int max_exp = 2;
  int coef_range = 5;
};

inline Jet jet(const VarSpace& sp, std::mt19937_64& rng, const Config& cfg = {}) {
  auto fields = sp.fields();
  Jet j(fields[std::uniform_int_distribution<std::size_t>(0, fields.size() - 1)(rng)]);
  int order = std::uniform_int_distribution<int>(0, cfg.max_order)(rng);
  std::uniform_int_distribution<int> var(0, sp.num_vars() - 1);
  for (int k = 0; k < order; ++k) j = j.derivative(var(rng));
  return j;
}

inline Rational coefficient(std::mt19937_64& rng, const Config& cfg = {}) {
  std::uniform_int_distribution<int> c(-cfg.coef_range, cfg.coef_range), d(1, 4);
  int num = c(rng);
  if (num == 0) num = 1;
  Rational q(num, d(rng));
  q.canonicalize();
  return q;
}

inline RatExpr poly(const VarSpace& sp, std::mt19937_64& rng, const Config& cfg = {}) {
  RatExpr out;
  int terms = std::uniform_int_distribution<int>(1, cfg.max_terms)(rng);
  for (int t = 0; t < terms; ++t) {
    RatExpr term(coefficient(rng, cfg));
    int facs = std::uniform_int_distribution<int>(0, cfg.max_factors)(rng);
    for (int f = 0; f < facs; ++f) term *= RatExpr(jet(sp, rng, cfg)).pow(std::uniform_int_distribution<int>(1, cfg.max_exp)(rng));
    out += term;
  }
  return out;
}

/// A rational expression whose denominator is a nonzero polynomial.
inline RatExpr expr(const VarSpace& sp, std::mt19937_64& rng, const Config& cfg = {}) {
  RatExpr num = poly(sp, rng, cfg);
  if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) return num;
  RatExpr den = poly(sp, rng, cfg);
  if (den.is_zero()) den = RatExpr(1);
  return num / den;
}

/// The single jet written in `text`.
inline Jet jet_of(const std::string& text, const VarSpace& sp) { return *mrt::parse(text, sp).jets().begin(); }

inline VarSpace space(std::mt19937_64& rng) {
  int which = std::uniform_int_distribution<int>(0, 2)(rng);
  int n = std::uniform_int_distribution<int>(1, 3)(rng);
  return VarSpace(static_cast<mrt::SpaceId>(which), n);
}

}  // namespace gen
