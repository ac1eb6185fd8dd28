#include <gtest/gtest.h>

#include "gen.hpp"

using namespace mrt;

namespace {

const MapKind kAllMaps[] = {MapKind::R_CH, MapKind::R_Q, MapKind::B_CH, MapKind::B_Q, MapKind::C_MR};

// Random source expression the map can transport: designated jets of the map
// differentiated along defined directions only.
RatExpr source_expr(const DerivationMap& m, std::mt19937_64& rng, int max_order = 2) {
  std::vector<int> dirs;
  for (int v = 0; v < static_cast<int>(m.ops.size()); ++v)
    if (m.op_defined(v)) dirs.push_back(v);
  std::uniform_int_distribution<std::size_t> pj(0, m.images.size() - 1), pd(0, dirs.size() - 1);
  std::uniform_int_distribution<int> nterms(1, 3), nfac(0, 2), ord(0, max_order);
  RatExpr out;
  for (int t = nterms(rng); t > 0; --t) {
    RatExpr term(gen::coefficient(rng));
    for (int f = nfac(rng); f > 0; --f) {
      Jet j = m.images[pj(rng)].first;
      for (int o = ord(rng); o > 0; --o) j = j.derivative(dirs[pd(rng)]);
      term *= RatExpr(j);
    }
    out += term;
  }
  return out;
}

bool only_first_var(const RatExpr& e) {
  for (const auto& j : e.jets())
    for (int v = 1; v < kMaxVars; ++v)
      if (j.d[v] > 0) return false;
  return true;
}

}  // namespace

TEST(Transport, Examples) {
  auto ch2 = VarSpace::ch(2);
  auto r2 = VarSpace::reciprocal(2);
  auto rch = build_map(MapKind::R_CH, 2);
  EXPECT_EQ(transport(rch, parse("P", ch2)), parse("1/X_{T0}", r2));
  EXPECT_EQ(transport(rch, parse("Omega[2]", ch2)), parse("2*X_{T2}", r2));
  EXPECT_TRUE(is_zero(transport(rch, parse("P_{T}", ch2)) -
                      parse("(X_{T1}*X_{T0,T0} - X_{T0}*X_{T0,T1})/X_{T0}^3", r2)));
  EXPECT_TRUE(is_zero(transport(rch, parse("P_{X}", ch2)) - parse("-X_{T0,T0}/X_{T0}^3", r2)));

  auto rq = build_map(MapKind::R_Q, 2);
  auto q2 = VarSpace::qiao(2);
  EXPECT_EQ(transport(rq, parse("v[1]_{x}", q2)), parse("x_{T0,T1}", r2));
  EXPECT_TRUE(is_zero(transport(rq, parse("v[1]_{x,x}", q2)) - parse("x_{T0,T0,T1}/x_{T0}", r2)));

  auto bch = build_map(MapKind::B_CH, 2);
  EXPECT_EQ(transport(bch, parse("X_{T0}", r2)), parse("1/P", ch2));
  EXPECT_EQ(transport(bch, parse("X_{T1}", r2)), parse("Omega[1]/2", ch2));
  EXPECT_TRUE(is_zero(transport(bch, parse("X_{T0,T0}", r2)) - parse("-P_{X}/P^3", ch2)));

  auto cmr = build_map(MapKind::C_MR, 1);
  EXPECT_EQ(transport(cmr, parse("u", VarSpace::qiao(1))), parse("P^2/(P - P_{X})", VarSpace::ch(1)));
}

TEST(Transport, Errors) {
  auto q2 = VarSpace::qiao(2);
  auto r2 = VarSpace::reciprocal(2);
  try {
    transport(build_map(MapKind::R_Q, 2), parse("v[1]", q2));
    ADD_FAILURE() << "bare v accepted";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("below the designated minimum jet"), std::string::npos) << e.what();
  }
  try {
    transport(build_map(MapKind::B_CH, 2), parse("X_{T2,T2}", r2));
    ADD_FAILURE() << "undefined direction accepted";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("no image"), std::string::npos) << e.what();
  }
  EXPECT_THROW(transport(build_map(MapKind::B_CH, 2), parse("x_{T0}", r2)), DomainError);
  EXPECT_THROW(transport(build_map(MapKind::R_CH, 2), parse("u", q2)), DomainError);
  EXPECT_THROW(build_map(MapKind::R_CH, 0), DomainError);
  EXPECT_THROW(build_map(MapKind::B_Q, 2).apply_op(2, RatExpr(1)), DomainError);
  EXPECT_EQ(map_from_name("C_MR"), MapKind::C_MR);
  EXPECT_FALSE(map_from_name("R_X"));
}

TEST(TransformProperty, HomomorphismAndChainRule) {
  std::mt19937_64 rng(21);
  for (MapKind which : kAllMaps) {
    for (int k = 0; k < 1000; ++k) {
      int n = 1 + k % 3;
      auto m = build_map(which, n);
      Transporter tr(m);
      // C_MR images carry P - P_X denominators; second jets swell quickly
      int order = which == MapKind::C_MR ? 1 : 2;
      RatExpr f = source_expr(m, rng, order), g = source_expr(m, rng, order);
      ASSERT_TRUE(is_zero(tr(f + g) - tr(f) - tr(g))) << map_name(which) << " " << k;
      ASSERT_TRUE(is_zero(tr(f * g) - tr(f) * tr(g))) << map_name(which) << " " << k;
      RatExpr c(Rational(1, 7) * k);
      ASSERT_EQ(tr(c), c);
      // the B maps reach mixed jets through the last direction, so along T0
      // the chain rule is exact only on T0-only expressions
      bool b_map = which == MapKind::B_CH || which == MapKind::B_Q;
      if (k % 4 == 0) {
        for (int v = 0; v < static_cast<int>(m.ops.size()); ++v) {
          if (!m.op_defined(v)) continue;
          if (b_map && v == 0 && !only_first_var(f)) continue;
          RatExpr lhs = tr(total_derivative(f, Var{m.source, static_cast<std::uint8_t>(v)}));
          ASSERT_TRUE(is_zero(lhs - m.apply_op(v, tr(f)))) << map_name(which) << " " << k << " var " << v;
        }
      }
    }
  }
}

// Mixed jets come back through a different derivative path, so the round
// trip holds modulo the hierarchy.
// On the Qiao side u_x comes back through u_t, and the w relations are not
// rewrite rules, so only x-only expressions without v are checked there,
// modulo the hierarchy.
TEST(TransformProperty, ReciprocalRoundTrip) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 300; ++k) {
    int n = 1 + k % 3;
    auto there = build_map(MapKind::R_CH, n), back = build_map(MapKind::B_CH, n);
    auto ch = standard_system(StandardSystem::CH, n);
    RatExpr f = source_expr(there, rng);
    RatExpr diff = transport(back, transport(there, f)) - f;
    ASSERT_TRUE(is_zero(reduce(ch, diff))) << print_text(f);

    auto qthere = build_map(MapKind::R_Q, n), qback = build_map(MapKind::B_Q, n);
    auto q = standard_system(StandardSystem::QIAO, n);
    RatExpr g = source_expr(qthere, rng);
    RatExpr qdiff = transport(qback, transport(qthere, g)) - g;
    bool has_v = false;
    for (const auto& j : g.jets()) has_v = has_v || j.field.family == family::v;
    if (only_first_var(g) && !has_v) {
      ASSERT_TRUE(is_zero(reduce(q, qdiff))) << print_text(g);
    }
  }
}

TEST(TransformProperty, HeightsUnderCmr) {
  for (int n = 1; n <= 4; ++n) {
    auto cmr = build_map(MapKind::C_MR, n);
    int seen = 0;
    for (const auto& e : gen_miura_relations(n)) {
      bool w_form = e.label.rfind("FIELDS", 0) == 0 && e.label.back() == 'b';
      if (e.label == "HEIGHTS" || e.label == "CROSSD" || w_form) {
        ++seen;
        EXPECT_TRUE(is_zero(transport(cmr, e.residual, true))) << e.label << " n=" << n;
      }
    }
    EXPECT_EQ(seen, n + 1);
  }
}

TEST(Commutation, AllMaps) {
  for (int n = 1; n <= 4; ++n) {
    EXPECT_TRUE(check_commutation(build_map(MapKind::R_CH, n), 50, 1));
    EXPECT_TRUE(check_commutation(build_map(MapKind::R_Q, n), 50, 2));
    EXPECT_TRUE(check_commutation(build_map(MapKind::C_MR, n), 50, 3));
    auto ch = standard_system(StandardSystem::CH, n);
    auto q = standard_system(StandardSystem::QIAO, n);
    EXPECT_TRUE(check_commutation(build_map(MapKind::B_CH, n), 50, 4, &ch));
    EXPECT_TRUE(check_commutation(build_map(MapKind::B_Q, n), 50, 5, &q));
  }
  EXPECT_THROW(check_commutation(build_map(MapKind::R_CH, 1), 0, 1), DomainError);
}

TEST(Commutation, DetectsCorruptedMap) {
  for (MapKind which : kAllMaps) {
    auto m = build_map(which, 2);
    m.ops[1]->front().coefficient += 1;
    auto ch = standard_system(StandardSystem::CH, 2);
    auto q = standard_system(StandardSystem::QIAO, 2);
    const RewriteSystem* modulo = which == MapKind::B_CH ? &ch : which == MapKind::B_Q ? &q : nullptr;
    EXPECT_FALSE(check_commutation(m, 20, 7, modulo)) << map_name(which);
  }
}
