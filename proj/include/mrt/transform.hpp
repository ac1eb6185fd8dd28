#pragma once

// Coordinate and field changes as derivation maps. A map fixes images for a
// set of designated jets and, for each source variable, the image of the
// corresponding total derivative as a derivation of the target space. Any
// other jet is transported by differentiating the image of a designated jet.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mrt/reduction.hpp"

namespace mrt {

enum class MapKind { R_CH, R_Q, B_CH, B_Q, C_MR };

inline std::string_view map_name(MapKind k) {
  switch (k) {
    case MapKind::R_CH: return "R_CH";
    case MapKind::R_Q: return "R_Q";
    case MapKind::B_CH: return "B_CH";
    case MapKind::B_Q: return "B_Q";
    case MapKind::C_MR: return "C_MR";
  }
  return "?";
}

inline std::optional<MapKind> map_from_name(std::string_view s) {
  for (auto k : {MapKind::R_CH, MapKind::R_Q, MapKind::B_CH, MapKind::B_Q, MapKind::C_MR})
    if (map_name(k) == s) return k;
  return std::nullopt;
}

/// One term of a derivation image: coefficient times the total derivative along a target variable.
struct DerivationTerm {
  RatExpr coefficient;
  int target_var = 0;
};

struct DerivationMap {
  std::string name;
  SpaceId source = SpaceId::CH;
  SpaceId target = SpaceId::R;
  int n = 1;
  /// Designated jets with their images, searched in order.
  std::vector<std::pair<Jet, RatExpr>> images;
  /// Per source variable; empty optional where the direction is undefined.
  std::vector<std::optional<std::vector<DerivationTerm>>> ops;

  /// Image of the total derivative along source variable `v`, applied to `f`.
  RatExpr apply_op(int v, const RatExpr& f) const {
    if (v < 0 || static_cast<std::size_t>(v) >= ops.size() || !ops[static_cast<std::size_t>(v)])
      throw DomainError(name + ": derivative along " + var_name(source, v) + " has no image");
    RatExpr out;
    for (const auto& t : *ops[static_cast<std::size_t>(v)]) {
      RatExpr d = total_derivative(f, Var{target, static_cast<std::uint8_t>(t.target_var)});
      if (!d.is_zero()) out += t.coefficient * d;
    }
    return out;
  }

  bool op_defined(int v) const {
    return v >= 0 && static_cast<std::size_t>(v) < ops.size() && ops[static_cast<std::size_t>(v)].has_value();
  }
};

/// Builds one of the five maps for n components.
inline DerivationMap build_map(MapKind which, int n) {
  require_n(n);
  Fields F(n);
  DerivationMap m;
  m.name = std::string(map_name(which));
  m.n = n;
  switch (which) {
    case MapKind::R_CH: {
      // X_0 = 1/P, X_1 = Omega1/2, Omega_i = 2 X_i; d_X = P d_0, d_T = d_1 - (P Omega1/2) d_0
      m.source = SpaceId::CH;
      m.target = SpaceId::R;
      RatExpr X0 = F.Xjet({0});
      m.images.emplace_back(Jet(F.ch().field(family::P)), 1 / X0);
      for (int i = 1; i <= n; ++i) m.images.emplace_back(Jet(F.ch().field(family::Omega, i)), 2 * RatExpr(F.Xjet({i})));
      m.ops.emplace_back(std::vector<DerivationTerm>{{1 / X0, 0}});
      m.ops.emplace_back(std::vector<DerivationTerm>{{1, 1}, {-RatExpr(F.Xjet({1})) / X0, 0}});
      break;
    }
    case MapKind::R_Q: {
      // x_0 = 1/u, x_i = w_i; v_i enters only through v_i_x = w_i_x / u
      m.source = SpaceId::Q;
      m.target = SpaceId::R;
      RatExpr x0 = F.xjet({0});
      m.images.emplace_back(Jet(F.qiao().field(family::u)), 1 / x0);
      for (int i = 1; i <= n; ++i) m.images.emplace_back(Jet(F.qiao().field(family::w, i)), RatExpr(F.xjet({i})));
      for (int i = 1; i <= n; ++i)
        m.images.emplace_back(Jet(F.qiao().field(family::v, i)).derivative(0), RatExpr(F.xjet({0, i})));
      m.ops.emplace_back(std::vector<DerivationTerm>{{1 / x0, 0}});
      m.ops.emplace_back(std::vector<DerivationTerm>{{1, 1}, {-RatExpr(F.xjet({1})) / x0, 0}});
      break;
    }
    case MapKind::B_CH: {
      m.source = SpaceId::R;
      m.target = SpaceId::CH;
      RatExpr P = F.P();
      m.images.emplace_back(F.Xjet({0}), 1 / P);
      for (int i = 1; i <= n; ++i) m.images.emplace_back(F.Xjet({i}), Rational(1, 2) * F.Omega(i));
      m.ops.resize(static_cast<std::size_t>(n) + 1);
      m.ops[0] = std::vector<DerivationTerm>{{1 / P, 0}};
      m.ops[1] = std::vector<DerivationTerm>{{1, 1}, {Rational(1, 2) * F.Omega(1), 0}};
      break;
    }
    case MapKind::B_Q: {
      m.source = SpaceId::R;
      m.target = SpaceId::Q;
      RatExpr u = F.u();
      m.images.emplace_back(F.xjet({0}), 1 / u);
      for (int i = 1; i <= n; ++i) m.images.emplace_back(F.xjet({i}), F.w(i));
      m.ops.resize(static_cast<std::size_t>(n) + 1);
      m.ops[0] = std::vector<DerivationTerm>{{1 / u, 0}};
      m.ops[1] = std::vector<DerivationTerm>{{1, 1}, {F.w(1), 0}};
      break;
    }
    case MapKind::C_MR: {
      // 1/u = (1/P)_X + 1/P, w_i = (Omega_i_X + Omega_i)/2, d_x = (u/P) d_X
      m.source = SpaceId::Q;
      m.target = SpaceId::CH;
      RatExpr P = F.P(), PX = F.DX(P), PT = F.DT(P);
      RatExpr Q = P - PX;
      m.images.emplace_back(Jet(F.qiao().field(family::u)), P * P / Q);
      for (int i = 1; i <= n; ++i) {
        RatExpr Om = F.Omega(i);
        m.images.emplace_back(Jet(F.qiao().field(family::w, i)), Rational(1, 2) * (F.DX(Om) + Om));
      }
      for (int i = 1; i <= n; ++i) {
        RatExpr Om = F.Omega(i);
        m.images.emplace_back(Jet(F.qiao().field(family::v, i)).derivative(0),
                              (F.DX(Om, 2) + F.DX(Om)) / (2 * P));
      }
      m.ops.emplace_back(std::vector<DerivationTerm>{{P / Q, 0}});
      m.ops.emplace_back(std::vector<DerivationTerm>{{1, 1}, {PT / Q, 0}});
      break;
    }
  }
  return m;
}

/// Memoizing transporter for one map. Not shared between threads.
class Transporter {
 public:
  explicit Transporter(DerivationMap m, bool keep_target_jets = false)
      : map_(std::move(m)), keep_target_(keep_target_jets) {}

  const DerivationMap& map() const { return map_; }

  /// Image of a single source jet.
  RatExpr image(const Jet& j) {
    if (auto it = memo_.find(j); it != memo_.end()) return it->second;
    if (j.space() != map_.source)
      throw DomainError(map_.name + ": jet " + jet_text(j) + " is not on the source space");
    RatExpr result;
    bool have_field = false, found = false;
    for (const auto& [dj, img] : map_.images) {
      if (dj.field != j.field) continue;
      have_field = true;
      if (!dj.divides(j)) continue;
      if (dj == j) {
        result = img;
        found = true;
        break;
      }
      // reachable only through defined directions
      bool ok = true;
      for (int v = 0; v < kMaxVars && ok; ++v)
        if (j.d[v] > dj.d[v] && !map_.op_defined(v)) ok = false;
      if (!ok) continue;
      int v = kMaxVars - 1;
      while (j.d[v] == dj.d[v]) --v;
      Jet below = j;
      below.d[v] -= 1;
      result = map_.apply_op(v, image(below));
      found = true;
      break;
    }
    if (!found) {
      if (have_field) {
        bool below_min = true;
        for (const auto& [dj, img] : map_.images)
          if (dj.field == j.field && dj.divides(j)) below_min = false;
        if (below_min)
          throw DomainError(map_.name + ": jet " + jet_text(j) + " lies below the designated minimum jet");
        throw DomainError(map_.name + ": jet " + jet_text(j) + " needs a derivative direction with no image");
      }
      throw DomainError(map_.name + ": field " + std::string(j.field.name()) + " has no image");
    }
    memo_.emplace(j, result);
    return result;
  }

  RatExpr operator()(const RatExpr& e) {
    return substitute(e, [this](const Jet& j) -> std::optional<RatExpr> {
      if (keep_target_ && j.space() == map_.target) return std::nullopt;
      return image(j);
    });
  }

 private:
  DerivationMap map_;
  bool keep_target_;
  std::map<Jet, RatExpr> memo_;
};

/// Image of `e` under `m`. With `keep_target_jets`, jets already on the target
/// space pass through unchanged (used for mixed CH/Qiao relations).
inline RatExpr transport(const DerivationMap& m, const RatExpr& e, bool keep_target_jets = false) {
  Transporter t(m, keep_target_jets);
  return t(e);
}

namespace detail {

// Random polynomial in low-order target jets, restricted to directions the map can reach.
inline RatExpr random_target_expr(const DerivationMap& m, std::mt19937_64& rng) {
  VarSpace sp(m.target, m.n);
  auto fields = sp.fields();
  std::uniform_int_distribution<int> nterms(1, 3), nfac(1, 2), ord(0, 2), coef(-3, 3);
  std::uniform_int_distribution<std::size_t> pick_field(0, fields.size() - 1);
  std::uniform_int_distribution<int> pick_var(0, std::min(sp.num_vars(), 3) - 1);
  RatExpr out;
  int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    int c = coef(rng);
    if (c == 0) c = 1;
    RatExpr term(static_cast<long>(c));
    int facs = nfac(rng);
    for (int k = 0; k < facs; ++k) {
      Jet j(fields[pick_field(rng)]);
      int o = ord(rng);
      for (int q = 0; q < o; ++q) j = j.derivative(pick_var(rng));
      term *= RatExpr(j);
    }
    out += term;
  }
  return out;
}

}  // namespace detail

/// True iff the images of every pair of defined source derivations commute on
/// `trials` random target expressions. For maps whose commutator vanishes only
/// on solutions of a system (B_CH, B_Q), pass that system as `modulo`.
inline bool check_commutation(const DerivationMap& m, int trials, std::uint64_t seed,
                              const RewriteSystem* modulo = nullptr) {
  if (trials < 1) throw DomainError("check_commutation: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> defined;
  for (std::size_t v = 0; v < m.ops.size(); ++v)
    if (m.ops[v]) defined.push_back(static_cast<int>(v));
  for (int t = 0; t < trials; ++t) {
    RatExpr f = detail::random_target_expr(m, rng);
    for (std::size_t a = 0; a < defined.size(); ++a)
      for (std::size_t b = a + 1; b < defined.size(); ++b) {
        RatExpr c = m.apply_op(defined[a], m.apply_op(defined[b], f)) - m.apply_op(defined[b], m.apply_op(defined[a], f));
        if (modulo) c = reduce(*modulo, c);
        if (!c.is_zero()) return false;
      }
  }
  return true;
}

}  // namespace mrt
