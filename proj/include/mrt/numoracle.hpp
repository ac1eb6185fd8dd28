#pragma once

// Floating-point oracle: analytic test functions with closed-form jets,
// evaluation of expressions at jet points, finite-difference checks.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "mrt/transform.hpp"

namespace mrt {

using Real = long double;

/// c * exp(a w_p) * sin(b w_q + phi)
struct Wave {
  Real c = 0, a = 0, b = 1, phi = 0;
  int p = 0, q = 0;
};

struct FieldFunction {
  Real c0 = 0;
  std::vector<Real> lin;
  std::vector<Wave> waves;

  Real jet(const std::array<std::uint8_t, kMaxVars>& d, const std::vector<Real>& w) const {
    int total = 0, nz = -1;
    for (int v = 0; v < kMaxVars; ++v)
      if (d[v]) {
        total += d[v];
        nz = v;
      }
    Real out = 0;
    if (total == 0) {
      out = c0;
      for (std::size_t v = 0; v < lin.size(); ++v) out += lin[v] * w[v];
    } else if (total == 1) {
      out = lin[static_cast<std::size_t>(nz)];
    }
    for (const auto& wv : waves) out += wave_jet(wv, d, w);
    return out;
  }

 private:
  static Real wave_jet(const Wave& wv, const std::array<std::uint8_t, kMaxVars>& d, const std::vector<Real>& w) {
    for (int v = 0; v < kMaxVars; ++v)
      if (d[v] && v != wv.p && v != wv.q) return 0;
    Real e = std::exp(wv.a * w[static_cast<std::size_t>(wv.p)]);
    Real theta = wv.b * w[static_cast<std::size_t>(wv.q)] + wv.phi;
    const Real half_pi = std::acos(Real(-1)) / 2;
    if (wv.p != wv.q) {
      int kp = d[wv.p], kq = d[wv.q];
      return wv.c * std::pow(wv.a, kp) * e * std::pow(wv.b, kq) * std::sin(theta + kq * half_pi);
    }
    int k = d[wv.p];
    Real sum = 0, binom = 1;
    for (int j = 0; j <= k; ++j) {
      sum += binom * std::pow(wv.a, k - j) * std::pow(wv.b, j) * std::sin(theta + j * half_pi);
      binom = binom * (k - j) / (j + 1);
    }
    return wv.c * e * sum;
  }
};

/// Per-space analytic test function. Field functions are drawn lazily and
/// deterministically from (seed, field), so the same seed gives the same
/// function regardless of evaluation order.
class TestFunction {
 public:
  TestFunction(SpaceId space, int num_vars, std::uint64_t seed) : space_(space), nv_(num_vars), seed_(seed) {}

  SpaceId space() const { return space_; }
  int num_vars() const { return nv_; }
  std::uint64_t seed() const { return seed_; }

  Real jet(const Jet& j, const std::vector<Real>& w) const {
    if (j.space() != space_) throw DomainError("test function on " + std::string(space_name(space_)) + " asked for " + jet_text(j));
    for (int v = nv_; v < kMaxVars; ++v)
      if (j.d[v]) throw DomainError("jet " + jet_text(j) + " uses a variable outside the test function");
    return field(j.field).jet(j.d, w);
  }

  const FieldFunction& field(const FieldSymbol& f) const {
    auto it = fields_.find(f);
    if (it != fields_.end()) return it->second;
    return fields_.emplace(f, draw(f)).first->second;
  }

 private:
  FieldFunction draw(const FieldSymbol& f) const {
    std::seed_seq ss{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                     static_cast<std::uint32_t>(f.space), static_cast<std::uint32_t>(f.family),
                     static_cast<std::uint32_t>(f.index)};
    std::mt19937_64 rng(ss);
    auto rat = [&](int lo, int hi, int den) {
      return Real(std::uniform_int_distribution<int>(lo, hi)(rng)) / den;
    };
    FieldFunction ff;
    ff.c0 = rat(20, 30, 10);
    for (int v = 0; v < nv_; ++v) ff.lin.push_back(rat(6, 10, 10));
    int nw = 2 + nv_;
    std::uniform_int_distribution<int> var(0, nv_ - 1);
    for (int k = 0; k < nw; ++k) {
      Wave wv;
      wv.c = rat(-10, 10, 100);
      wv.a = rat(-4, 4, 8);
      wv.b = rat(4, 12, 8);
      wv.phi = rat(0, 7, 4);
      wv.p = var(rng);
      wv.q = var(rng);
      ff.waves.push_back(wv);
    }
    return ff;
  }

  SpaceId space_;
  int nv_;
  std::uint64_t seed_;
  mutable std::map<FieldSymbol, FieldFunction> fields_;
};

/// An assignment of values to jets. Explicit values take priority; otherwise
/// values come from the test function of the jet's space at the stored
/// coordinates, or, when a rewrite system is attached and the jet is
/// reducible, from the prolonged rule evaluated at this point.
class JetPoint {
 public:
  JetPoint() = default;

  void set(const Jet& j, Real v) { values_[j] = v; }
  void add_source(std::shared_ptr<const TestFunction> tf, std::vector<Real> coords) {
    sources_.push_back({std::move(tf), std::move(coords)});
  }
  void attach(std::shared_ptr<const RewriteSystem> sys) { sys_ = std::move(sys); }

  /// Test function descriptors and coordinates.
  std::string provenance() const {
    std::string s;
    for (const auto& src : sources_) {
      s += std::string(space_name(src.tf->space())) + " seed " + std::to_string(src.tf->seed()) + " at (";
      for (std::size_t k = 0; k < src.coords.size(); ++k)
        s += (k ? ", " : "") + std::to_string(static_cast<double>(src.coords[k]));
      s += ") ";
    }
    return s;
  }

  Real value(const Jet& j) const;

 private:
  struct Source {
    std::shared_ptr<const TestFunction> tf;
    std::vector<Real> coords;
  };
  std::map<Jet, Real> values_;
  std::vector<Source> sources_;
  std::shared_ptr<const RewriteSystem> sys_;
  mutable std::map<Jet, Real> cache_;
};

/// Value with magnitude scale: the sum of absolute term values of the
/// numerator divided by |denominator|.
struct Evaluation {
  Real value = 0;
  Real scale = 0;
  Real relative() const { return scale > 0 ? std::fabs(value) / scale : std::fabs(value); }
};

namespace detail {

inline Real to_real(const Rational& q) {
  // exact up to the final rounding for the coefficient sizes that occur
  mpf_class f(q, 128);
  long exp = 0;
  double hi = mpf_get_d_2exp(&exp, f.get_mpf_t());
  mpf_class rest = f - mpf_class(std::ldexp(hi, static_cast<int>(exp)), 128);
  return std::ldexp(static_cast<Real>(hi), static_cast<int>(exp)) + static_cast<Real>(rest.get_d());
}

inline std::pair<Real, Real> eval_poly(const DiffPoly& p, const std::function<Real(const Jet&)>& val) {
  Real sum = 0, abs_sum = 0;
  std::map<Jet, Real> memo;
  for (auto& [m, c] : p.terms()) {
    Real t = to_real(c);
    for (auto& [j, e] : m.factors()) {
      auto it = memo.find(j);
      if (it == memo.end()) it = memo.emplace(j, val(j)).first;
      for (std::uint32_t k = 0; k < e; ++k) t *= it->second;
    }
    sum += t;
    abs_sum += std::fabs(t);
  }
  return {sum, abs_sum};
}

}  // namespace detail

class DenominatorTooSmall : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Evaluates `e` with jet values from `val`. Throws DenominatorTooSmall when
/// |den| <= min_den times its own term scale.
inline Evaluation eval_scaled(const RatExpr& e, const std::function<Real(const Jet&)>& val, Real min_den = 1e-12L) {
  auto [n, ns] = detail::eval_poly(e.num(), val);
  auto [d, ds] = detail::eval_poly(e.den(), val);
  if (std::fabs(d) <= min_den * std::max(ds, Real(1e-300)))
    throw DenominatorTooSmall("denominator too small at evaluation point");
  return {n / d, ns / std::fabs(d)};
}

inline Evaluation eval_scaled(const RatExpr& e, const JetPoint& p, Real min_den = 1e-12L) {
  return eval_scaled(e, [&](const Jet& j) { return p.value(j); }, min_den);
}

inline Real eval(const RatExpr& e, const JetPoint& p) { return eval_scaled(e, p).value; }

inline Real JetPoint::value(const Jet& j) const {
  if (auto it = values_.find(j); it != values_.end()) return it->second;
  if (auto it = cache_.find(j); it != cache_.end()) return it->second;
  Real v = 0;
  bool found = false;
  if (sys_)
    if (auto r = sys_->match(j)) {
      v = eval_scaled(sys_->prolonged(*r, j), *this).value;
      found = true;
    }
  if (!found)
    for (const auto& src : sources_)
      if (src.tf->space() == j.space()) {
        v = src.tf->jet(j, src.coords);
        found = true;
        break;
      }
  if (!found) throw DomainError("no value for jet " + jet_text(j));
  cache_.emplace(j, v);
  return v;
}

/// Number of variables the R space needs for the jets of `e` (at least 2).
inline int vars_needed(const std::set<Jet>& jets, SpaceId space) {
  int nv = 2;
  for (const auto& j : jets)
    if (j.space() == space) {
      for (int v = 0; v < kMaxVars; ++v)
        if (j.d[v]) nv = std::max(nv, v + 1);
      if (space == SpaceId::R) nv = std::max(nv, 2);
    }
  return nv;
}

/// Generates random jet points over the given spaces from one seed.
class PointSampler {
 public:
  PointSampler(std::map<SpaceId, int> num_vars, std::uint64_t seed, std::shared_ptr<const RewriteSystem> sys = nullptr)
      : rng_(seed), sys_(std::move(sys)) {
    std::uint64_t k = 0;
    for (auto [s, nv] : num_vars) tfs_.emplace(s, std::make_shared<TestFunction>(s, nv, seed * 1000003ULL + ++k));
  }

  JetPoint next() {
    JetPoint p;
    std::uniform_real_distribution<double> coord(-0.5, 0.5);
    for (auto& [s, tf] : tfs_) {
      std::vector<Real> w;
      for (int v = 0; v < tf->num_vars(); ++v) w.push_back(coord(rng_));
      p.add_source(tf, std::move(w));
    }
    if (sys_) p.attach(sys_);
    return p;
  }

  const TestFunction& function(SpaceId s) const { return *tfs_.at(s); }

 private:
  std::mt19937_64 rng_;
  std::map<SpaceId, std::shared_ptr<TestFunction>> tfs_;
  std::shared_ptr<const RewriteSystem> sys_;
};

/// Spaces of `e` with the variable counts their test functions need.
inline std::map<SpaceId, int> sampling_spaces(const std::vector<RatExpr>& es, int min_r_vars = 2) {
  std::set<Jet> jets;
  for (const auto& e : es)
    for (const auto& j : e.jets()) jets.insert(j);
  std::map<SpaceId, int> out;
  for (const auto& j : jets) out[j.space()] = 0;
  for (auto& [s, nv] : out) nv = std::max(vars_needed(jets, s), s == SpaceId::R ? min_r_vars : 2);
  return out;
}

/// Calls `fn` at `trials` points, resampling points where a denominator is
/// too close to zero. Returns the largest relative residual reported by `fn`.
inline Real sample_max(PointSampler& sampler, int trials, const std::function<Real(const JetPoint&)>& fn) {
  Real worst = 0;
  for (int t = 0; t < trials; ++t) {
    for (int attempt = 0;; ++attempt) {
      JetPoint p = sampler.next();
      try {
        worst = std::max(worst, fn(p));
        break;
      } catch (const DenominatorTooSmall&) {
        if (attempt >= 50) throw;
      }
    }
  }
  return worst;
}

/// Finite-difference check of total_derivative(e, v) along the test function:
/// central differences with steps 1e-3 and 5e-4, Richardson-extrapolated.
/// Returns |fd - exact| / max(|exact|, 1).
inline Real fd_check(const RatExpr& e, Var v, const TestFunction& tf, const std::vector<Real>& at) {
  RatExpr d = total_derivative(e, v);
  auto value_at = [&](const RatExpr& x, const std::vector<Real>& w) {
    return eval_scaled(x, [&](const Jet& j) { return tf.jet(j, w); }).value;
  };
  auto central = [&](Real h) {
    std::vector<Real> plus = at, minus = at;
    plus[v.index] += h;
    minus[v.index] -= h;
    return (value_at(e, plus) - value_at(e, minus)) / (2 * h);
  };
  Real d1 = central(1e-3L), d2 = central(5e-4L);
  Real fd = (4 * d2 - d1) / 3;
  Real exact = value_at(d, at);
  return std::fabs(fd - exact) / std::max(std::fabs(exact), Real(1));
}

/// True iff |a - cofactor*b| <= tol relative at all sampled points. Points where
/// the expressions are singular are resampled.
inline bool numeric_proportionality(const RatExpr& a, const RatExpr& b, const RatExpr& cofactor, int trials,
                                    std::uint64_t seed, Real tol = 1e-9L) {
  PointSampler sampler(sampling_spaces({a, b, cofactor}), seed);
  Real worst = sample_max(sampler, trials, [&](const JetPoint& p) {
    Real va = eval_scaled(a, p, 1e-6L).value;
    auto vb = eval_scaled(b, p, 1e-6L);
    Real vc = eval_scaled(cofactor, p, 1e-6L).value;
    Real scale = std::max({std::fabs(va), std::fabs(vc * vb.value), std::fabs(vc) * vb.scale, Real(1e-300)});
    return std::fabs(va - vc * vb.value) / scale;
  });
  return worst <= tol;
}

/// Largest relative residual of `e` over `trials` points. With `sys`, reducible
/// jets take the values implied by the system, so that residuals vanishing
/// only modulo the system are confirmed too.
inline Real numeric_zero_residual(const RatExpr& e, int trials, std::uint64_t seed,
                                  std::shared_ptr<const RewriteSystem> sys = nullptr, int min_r_vars = 2) {
  if (e.is_zero()) return 0;
  PointSampler sampler(sampling_spaces({e}, min_r_vars), seed, std::move(sys));
  return sample_max(sampler, trials, [&](const JetPoint& p) { return eval_scaled(e, p, 1e-6L).relative(); });
}

/// Evaluates the source expression `e` with every source jet valued through
/// its image under `tr` at target points (consistent with `sys` if given).
/// Jets on the target space keep their own values. Returns the largest
/// relative residual.
inline Real numeric_transport_residual(Transporter& tr, const RatExpr& e, int trials, std::uint64_t seed,
                                       std::shared_ptr<const RewriteSystem> sys = nullptr) {
  const DerivationMap& m = tr.map();
  std::vector<RatExpr> images;
  std::map<Jet, RatExpr> image_of;
  for (const auto& j : e.jets())
    if (j.space() == m.source) {
      image_of.emplace(j, tr.image(j));
      images.push_back(image_of.at(j));
    } else {
      images.emplace_back(j);
    }
  PointSampler sampler(sampling_spaces(images, m.n + 1), seed, std::move(sys));
  return sample_max(sampler, trials, [&](const JetPoint& p) {
    return eval_scaled(e, [&](const Jet& j) -> Real {
      auto it = image_of.find(j);
      if (it == image_of.end()) return p.value(j);
      return eval_scaled(it->second, p, 1e-6L).value;
    }, 1e-6L).relative();
  });
}

}  // namespace mrt
