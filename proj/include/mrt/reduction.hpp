#pragma once

// Oriented equations and reduction to normal form modulo their differential
// consequences. Prolongations are built on demand and cached.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "mrt/exprio.hpp"
#include "mrt/hierarchies.hpp"

namespace mrt {

/// Strict total order on jets used to orient rules. `less(a, b)` means a ranks below b.
using Ranking = std::function<bool(const Jet&, const Jet&)>;

/// Multi-index compared from the last variable down (time before space on
/// CH/Q, T_n first on the reciprocal space), then field priority: P above
/// Omega[1] above Omega[2], X above x.
inline bool default_rank_less(const Jet& a, const Jet& b) {
  if (a.space() != b.space()) return a.space() < b.space();
  for (int v = kMaxVars - 1; v >= 0; --v)
    if (a.d[v] != b.d[v]) return a.d[v] < b.d[v];
  if (a.field.family != b.field.family) return a.field.family > b.field.family;
  return a.field.index > b.field.index;
}

struct RewriteRule {
  Jet lead;
  RatExpr rhs;
  std::string origin;
};

/// Solves `eq` for `lead`. The lead must occur linearly and every jet of the
/// solved right-hand side must rank strictly below it.
inline RewriteRule orient(const Equation& eq, const Jet& lead, const Ranking& rank_less = default_rank_less) {
  if (eq.residual.den().degree(lead) > 0)
    throw DomainError("orient: " + jet_text(lead) + " occurs in the denominator of " + eq.label);
  auto coeffs = eq.residual.num().coefficients_in(lead);
  if (coeffs.size() < 2) throw DomainError("orient: " + jet_text(lead) + " is absent from " + eq.label);
  if (coeffs.size() > 2) throw DomainError("orient: " + jet_text(lead) + " occurs nonlinearly in " + eq.label);
  if (coeffs[1].is_zero()) throw DomainError("orient: solved coefficient is identically zero");
  RatExpr rhs = -RatExpr(coeffs[0]) / RatExpr(coeffs[1]);
  for (const auto& j : rhs.jets())
    if (!rank_less(j, lead))
      throw DomainError("orient: right-hand side for " + jet_text(lead) + " contains " + jet_text(j) +
                        ", which does not rank below the lead");
  return {lead, rhs, eq.label};
}

struct ReduceOptions {
  bool shuffle = false;
  std::uint64_t seed = 0;
};

class RewriteSystem {
 public:
  static constexpr std::size_t kDefaultStepCap = 10000;

  RewriteSystem(std::vector<RewriteRule> rules, Ranking rank = default_rank_less)
      : rules_(std::move(rules)), rank_(std::move(rank)), cache_(std::make_shared<Cache>()) {}

  const std::vector<RewriteRule>& rules() const { return rules_; }
  const Ranking& ranking() const { return rank_; }
  std::size_t step_cap() const { return step_cap_; }
  void set_step_cap(std::size_t cap) { step_cap_ = cap; }

  /// Index of the first rule whose lead divides `j`.
  std::optional<std::size_t> match(const Jet& j) const {
    for (std::size_t r = 0; r < rules_.size(); ++r)
      if (rules_[r].lead.divides(j)) return r;
    return std::nullopt;
  }

  std::vector<std::size_t> matches(const Jet& j) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rules_.size(); ++r)
      if (rules_[r].lead.divides(j)) out.push_back(r);
    return out;
  }

  /// Right-hand side of rule `r` prolonged to the jet `j` (lead of r must divide j).
  RatExpr prolonged(std::size_t r, const Jet& j) const {
    const RewriteRule& rule = rules_.at(r);
    if (j == rule.lead) return rule.rhs;
    {
      std::lock_guard lock(cache_->mu);
      auto it = cache_->prolonged.find({r, j});
      if (it != cache_->prolonged.end()) return it->second;
    }
    // differentiate the rule one step below j
    int v = kMaxVars - 1;
    while (j.d[v] == rule.lead.d[v]) --v;
    Jet below = j;
    below.d[v] -= 1;
    RatExpr result = total_derivative(prolonged(r, below), Var{j.space(), static_cast<std::uint8_t>(v)});
    std::lock_guard lock(cache_->mu);
    cache_->prolonged.emplace(std::make_pair(r, j), result);
    return result;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::pair<std::size_t, Jet>, RatExpr> prolonged;
  };

  std::vector<RewriteRule> rules_;
  Ranking rank_;
  std::size_t step_cap_ = kDefaultStepCap;
  std::shared_ptr<Cache> cache_;
};

/// Rewrites until no jet of the result matches a (prolonged) rule lead.
///
/// Deterministic mode always rewrites the highest-ranked reducible jet with the
/// first matching rule; shuffle mode picks jet and rule at random.
inline RatExpr reduce(const RewriteSystem& sys, RatExpr e, const ReduceOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::vector<std::string> trace;
  for (std::size_t step = 0;; ++step) {
    if (e.is_zero()) return e;
    std::vector<Jet> reducible;
    for (const auto& j : e.jets())
      if (sys.match(j)) reducible.push_back(j);
    if (reducible.empty()) return e;
    if (step >= sys.step_cap()) {
      std::string tail;
      for (std::size_t k = trace.size() > 8 ? trace.size() - 8 : 0; k < trace.size(); ++k) tail += " " + trace[k];
      throw StepCapError("reduction exceeded " + std::to_string(sys.step_cap()) + " steps; last rewrites:" + tail);
    }
    Jet target;
    std::size_t rule = 0;
    if (opt.shuffle) {
      target = reducible[std::uniform_int_distribution<std::size_t>(0, reducible.size() - 1)(rng)];
      auto ms = sys.matches(target);
      rule = ms[std::uniform_int_distribution<std::size_t>(0, ms.size() - 1)(rng)];
    } else {
      target = *std::max_element(reducible.begin(), reducible.end(), sys.ranking());
      rule = *sys.match(target);
    }
    RatExpr rhs = sys.prolonged(rule, target);
    for (const auto& j : rhs.jets())
      if (!sys.ranking()(j, target))
        throw Error("rewrite of " + jet_text(target) + " would introduce " + jet_text(j) + ", which does not rank below it");
    trace.push_back(jet_text(target));
    e = substitute(e, target, rhs);
  }
}

enum class StandardSystem { CH, BCBS, QIAO };

inline std::optional<StandardSystem> standard_system_from_name(std::string_view s) {
  if (s == "CH" || s == "ch") return StandardSystem::CH;
  if (s == "BCBS" || s == "bcbs") return StandardSystem::BCBS;
  if (s == "QIAO" || s == "qiao") return StandardSystem::QIAO;
  return std::nullopt;
}

/// CH(n): P_T, Omega_i_{XXX} (i < n), Omega_n_{XX}.
/// BCBS(n): X_{T0,T(i+1)} for i = 1..n-1.
/// QIAO(n): u_t, v_i_{xxx} (i < n), v_n_{xx}.
inline RewriteSystem standard_system(StandardSystem which, int n) {
  require_n(n);
  Fields F(n);
  std::vector<RewriteRule> rules;
  switch (which) {
    case StandardSystem::CH: {
      auto eqs = gen_ch(n);
      Jet P(F.ch().field(family::P));
      rules.push_back(orient(eqs[0], P.derivative(1)));
      for (int i = 1; i < n; ++i) rules.push_back(orient(eqs[i], Jet(F.ch().field(family::Omega, i)).derivative(0, 3)));
      rules.push_back(orient(eqs[n], Jet(F.ch().field(family::Omega, n)).derivative(0, 2)));
      break;
    }
    case StandardSystem::BCBS: {
      if (n < 2) throw DomainError("the BCBS system needs n >= 2");
      auto fam = gen_cbs_family(n);
      for (int i = 1; i < n; ++i) rules.push_back(orient(fam.bcbs[i - 1], F.Xjet({0, i + 1})));
      break;
    }
    case StandardSystem::QIAO: {
      auto eqs = gen_qiao(n);
      Jet u(F.qiao().field(family::u));
      rules.push_back(orient(eqs[0], u.derivative(1)));
      for (int i = 1; i < n; ++i) rules.push_back(orient(eqs[i], Jet(F.qiao().field(family::v, i)).derivative(0, 3)));
      rules.push_back(orient(eqs[n], Jet(F.qiao().field(family::v, n)).derivative(0, 2)));
      break;
    }
  }
  return RewriteSystem(std::move(rules));
}

}  // namespace mrt
