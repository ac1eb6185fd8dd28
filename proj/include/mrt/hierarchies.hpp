#pragma once

// Equation families of the Camassa-Holm and Qiao hierarchies, their reciprocal
// images, and the Miura-reciprocal relations between them, generated for a
// concrete number of components n.
//
// The recursion-operator forms U_T = R^{-n} U_X (R = K J^{-1}, K = d_XXX - d_X,
// J = -(d_X U + U d_X)/2) and u_t = r^{-n} u_x (r = k j^{-1}, k = d_xxx - d_x,
// j = -d_x u d_x^{-1} u d_x) are only represented through their expanded
// systems. U = P^2 throughout; U never appears as a field.

#include <optional>
#include <string>
#include <vector>

#include "mrt/diffalg.hpp"

namespace mrt {

enum class SystemKind { CH, QIAO, BCBS, BMCBS, MSYS, MCBS_SYS, CBS, MIURA, HEIGHTS, FIELDS, XREL };

inline std::string_view system_name(SystemKind k) {
  switch (k) {
    case SystemKind::CH: return "CH";
    case SystemKind::QIAO: return "QIAO";
    case SystemKind::BCBS: return "BCBS";
    case SystemKind::BMCBS: return "BMCBS";
    case SystemKind::MSYS: return "MSYS";
    case SystemKind::MCBS_SYS: return "MCBS_SYS";
    case SystemKind::CBS: return "CBS";
    case SystemKind::MIURA: return "MIURA";
    case SystemKind::HEIGHTS: return "HEIGHTS";
    case SystemKind::FIELDS: return "FIELDS";
    case SystemKind::XREL: return "XREL";
  }
  return "?";
}

/// A labelled residual, asserted to vanish.
struct Equation {
  RatExpr residual;
  std::string label;
  SystemKind system = SystemKind::CH;
  std::optional<int> i;
  int n = 1;
};

struct OperatorSpec {
  std::string name;
  std::string description;
};

inline std::vector<OperatorSpec> operator_specs() {
  return {{"K", "d_XXX - d_X"},
          {"J", "-(1/2)(d_X U + U d_X)"},
          {"R", "K J^{-1}"},
          {"k", "d_xxx - d_x"},
          {"j", "-d_x u (d_x)^{-1} u d_x"},
          {"r", "k j^{-1}"}};
}

/// Field and derivative shorthands for one concrete n.
class Fields {
 public:
  explicit Fields(int n) : n_(n), ch_(VarSpace::ch(n)), q_(VarSpace::qiao(n)), r_(VarSpace::reciprocal(n)) {}

  int n() const { return n_; }
  const VarSpace& ch() const { return ch_; }
  const VarSpace& qiao() const { return q_; }
  const VarSpace& reciprocal() const { return r_; }

  // CH space
  Var X_var() const { return ch_.var(0); }
  Var T_var() const { return ch_.var(1); }
  RatExpr P() const { return Jet(ch_.field(family::P)); }
  RatExpr Omega(int i) const { return Jet(ch_.field(family::Omega, i)); }
  RatExpr DX(const RatExpr& e, int k = 1) const { return repeat(e, X_var(), k); }
  RatExpr DT(const RatExpr& e, int k = 1) const { return repeat(e, T_var(), k); }

  // Qiao space
  Var x_var() const { return q_.var(0); }
  Var t_var() const { return q_.var(1); }
  RatExpr u() const { return Jet(q_.field(family::u)); }
  RatExpr v(int i) const { return Jet(q_.field(family::v, i)); }
  RatExpr w(int i) const { return Jet(q_.field(family::w, i)); }
  RatExpr Dx(const RatExpr& e, int k = 1) const { return repeat(e, x_var(), k); }
  RatExpr Dt(const RatExpr& e, int k = 1) const { return repeat(e, t_var(), k); }

  // reciprocal space
  Var T(int k) const { return r_.var(k); }
  Jet Xjet(std::initializer_list<int> ders = {}) const { return rjet(family::X, ders); }
  Jet xjet(std::initializer_list<int> ders = {}) const { return rjet(family::x, ders); }
  Jet Mjet(std::initializer_list<int> ders = {}) const { return rjet(family::M, ders); }
  Jet mjet(std::initializer_list<int> ders = {}) const { return rjet(family::m, ders); }
  RatExpr D(const RatExpr& e, int var, int k = 1) const { return repeat(e, T(var), k); }

  /// X_{00}/X_0 + X_0, the quantity whose derivative structure builds the CBS families.
  RatExpr S() const {
    RatExpr X0 = Xjet({0});
    return RatExpr(Xjet({0, 0})) / X0 + X0;
  }
  /// (S)_0 - S^2/2.
  RatExpr B() const {
    RatExpr s = S();
    return D(s, 0) - Rational(1, 2) * s * s;
  }

 private:
  static RatExpr repeat(RatExpr e, Var v, int k) {
    for (int i = 0; i < k; ++i) e = total_derivative(e, v);
    return e;
  }
  Jet rjet(std::uint8_t fam, std::initializer_list<int> ders) const {
    Jet j(r_.field(fam));
    for (int v : ders) j = j.derivative(r_.var(v).index);
    return j;
  }

  int n_;
  VarSpace ch_, q_, r_;
};

inline void require_n(int n) {
  if (n < 1 || n > kMaxN) throw DomainError("n must be in 1.." + std::to_string(kMaxN));
}

/// P_T + (P Omega1)_X / 2;  Omega_i''' - Omega_i' + P (P Omega_{i+1})';  P^2 - Omega_n'' + Omega_n.
inline std::vector<Equation> gen_ch(int n) {
  require_n(n);
  Fields F(n);
  auto P = F.P();
  std::vector<Equation> out;
  out.push_back({F.DT(P) + Rational(1, 2) * F.DX(P * F.Omega(1)), "E_CH0", SystemKind::CH, 0, n});
  for (int i = 1; i < n; ++i) {
    auto Om = F.Omega(i);
    out.push_back({F.DX(Om, 3) - F.DX(Om) + P * F.DX(P * F.Omega(i + 1)), "E_CH" + std::to_string(i),
                   SystemKind::CH, i, n});
  }
  out.push_back({P * P - F.DX(F.Omega(n), 2) + F.Omega(n), "E_CHn", SystemKind::CH, n, n});
  return out;
}

/// u_t + (u w1)_x;  v_i''' - v_i' + (u w_{i+1})';  u - v_n'' + v_n;  w_i' - u v_i'.
inline std::vector<Equation> gen_qiao(int n) {
  require_n(n);
  Fields F(n);
  auto u = F.u();
  std::vector<Equation> out;
  out.push_back({F.Dt(u) + F.Dx(u * F.w(1)), "E_Q0", SystemKind::QIAO, 0, n});
  for (int i = 1; i < n; ++i) {
    auto v = F.v(i);
    out.push_back({F.Dx(v, 3) - F.Dx(v) + F.Dx(u * F.w(i + 1)), "E_Q" + std::to_string(i), SystemKind::QIAO, i, n});
  }
  out.push_back({u - F.Dx(F.v(n), 2) + F.v(n), "E_Qn", SystemKind::QIAO, n, n});
  for (int i = 1; i <= n; ++i)
    out.push_back({F.Dx(F.w(i)) - u * F.Dx(F.v(i)), "E_Qw" + std::to_string(i), SystemKind::QIAO, i, n});
  return out;
}

struct CbsFamily {
  std::vector<Equation> bcbs;
  std::vector<Equation> msys;
  std::vector<Equation> cbs;
};

/// The reciprocal image of the CH hierarchy (one copy per i = 1..n-1), its
/// potential form in M, and the CBS equations in M.
///
/// bcbs_i is oriented as (X_{i+1}/X_0)_0 + {S_0 - S^2/2}_i, so that the CH
/// middle equations transport onto it with cofactor 2 X_0^{-2}.
inline CbsFamily gen_cbs_family(int n) {
  require_n(n);
  CbsFamily fam;
  if (n < 2) return fam;
  Fields F(n);
  RatExpr X0 = F.Xjet({0});
  RatExpr B = F.B();
  fam.msys.push_back({RatExpr(F.Mjet({0})) - Rational(1, 4) * B, "M0", SystemKind::MSYS, 0, n});
  for (int i = 1; i < n; ++i) {
    RatExpr ratio = RatExpr(F.Xjet({i + 1})) / X0;
    fam.bcbs.push_back({F.D(ratio, 0) + F.D(B, i), "bCBS" + std::to_string(i), SystemKind::BCBS, i, n});
    fam.msys.push_back(
        {RatExpr(F.Mjet({i})) + Rational(1, 4) * ratio, "M" + std::to_string(i), SystemKind::MSYS, i, n});
    RatExpr cbs = RatExpr(F.Mjet({0, i + 1})) + RatExpr(F.Mjet({0, 0, 0, i})) +
                  4 * RatExpr(F.Mjet({i})) * RatExpr(F.Mjet({0, 0})) + 8 * RatExpr(F.Mjet({0})) * RatExpr(F.Mjet({0, i}));
    fam.cbs.push_back({cbs, "CBS" + std::to_string(i), SystemKind::CBS, i, n});
  }
  return fam;
}

struct McbsFamily {
  std::vector<Equation> bmcbs;
  std::vector<Equation> msys;
};

/// The reciprocal image of the Qiao hierarchy and its potential system in m.
inline McbsFamily gen_mcbs_family(int n) {
  require_n(n);
  Fields F(n);
  McbsFamily fam;
  RatExpr x0 = F.xjet({0});
  RatExpr half_sq = Rational(1, 2) * x0 * x0;
  fam.msys.push_back({RatExpr(F.mjet({0})) - half_sq, "m0", SystemKind::MCBS_SYS, 0, n});
  for (int i = 1; i < n; ++i) {
    RatExpr mi = RatExpr(F.xjet({i + 1})) / x0 + RatExpr(F.xjet({i, 0, 0})) / x0;
    fam.bmcbs.push_back({F.D(mi, 0) - F.D(half_sq, i), "bmCBS" + std::to_string(i), SystemKind::BMCBS, i, n});
    fam.msys.push_back({RatExpr(F.mjet({i})) - mi, "m" + std::to_string(i), SystemKind::MCBS_SYS, i, n});
  }
  return fam;
}

/// Miura relation, its consequences for X and x, and the relations between the
/// CH and Qiao fields (mixed CH/Q residuals for HEIGHTS, FIELDS and XREL).
inline std::vector<Equation> gen_miura_relations(int n) {
  require_n(n);
  Fields F(n);
  std::vector<Equation> out;
  RatExpr X0 = F.Xjet({0}), x0 = F.xjet({0});
  out.push_back({4 * RatExpr(F.Mjet()) - x0 + RatExpr(F.mjet()), "MIURA", SystemKind::MIURA, std::nullopt, n});
  out.push_back({x0 - F.S(), "HEIGHTS-R", SystemKind::MIURA, std::nullopt, n});
  for (int i = 1; i < n; ++i) {
    RatExpr r = RatExpr(F.Xjet({i + 1})) / X0 + RatExpr(F.xjet({0, i})) - RatExpr(F.xjet({0, 0, i})) / x0 -
                RatExpr(F.xjet({i + 1})) / x0;
    out.push_back({r, "MIX2_" + std::to_string(i), SystemKind::MIURA, i, n});
  }
  auto P = F.P(), u = F.u();
  // 1/u = (1/P)_X + 1/P with denominators cleared
  out.push_back({P * P - u * (P - F.DX(P)), "HEIGHTS", SystemKind::HEIGHTS, std::nullopt, n});
  for (int i = 1; i < n; ++i) {
    auto Om = F.Omega(i + 1);
    out.push_back({P * Om - 2 * F.v(i) + 2 * F.Dx(F.v(i)), "FIELDS" + std::to_string(i) + "a", SystemKind::FIELDS,
                   i, n});
    out.push_back({F.w(i + 1) - Rational(1, 2) * (F.DX(Om) + Om), "FIELDS" + std::to_string(i) + "b",
                   SystemKind::FIELDS, i, n});
  }
  auto Om1 = F.Omega(1);
  out.push_back({F.w(1) - Rational(1, 2) * (F.DX(Om1) + Om1), "CROSSD", SystemKind::XREL, std::nullopt, n});
  // dx = (1 - P_X/P) dX + (w1 - Omega1/2 (1 - P_X/P)) dT against d(X - ln P)
  RatExpr ratio = 1 - F.DX(P) / P;
  out.push_back({F.w(1) - Rational(1, 2) * Om1 * ratio + F.DT(P) / P, "XREL", SystemKind::XREL, std::nullopt, n});
  return out;
}

}  // namespace mrt
