// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gen.hpp"

using namespace mrt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(MRT_CLI) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("mrt_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const std::vector<VerificationReport>& suite() {
  static const std::vector<VerificationReport> rs = run_all(4);
  return rs;
}

const VerificationReport& cell(const std::string& claim, int n) {
  for (const auto& r : suite())
    if (r.claim == claim && r.n == n) return r;
  throw std::runtime_error("missing cell " + claim + " n=" + std::to_string(n));
}

std::string where(const VerificationReport& r) { return r.claim + " n=" + std::to_string(r.n); }

Outcome claim_suite() {
  Outcome o;
  fs::path report = workdir() / "timed.json";
  auto start = std::chrono::steady_clock::now();
  int code = run_cli("verify --claim all --n-max 4 --timings --report " + report.string());
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.check(code == 0, "exit code " + std::to_string(code));
  auto arr = nlohmann::json::parse(slurp(report));
  o.check(arr.size() == 36, "expected 36 cells, got " + std::to_string(arr.size()));
  long long worst = 0;
  for (const auto& r : arr) {
    o.check(r["status"] == "pass", r["claim"].get<std::string>() + " n=" + std::to_string(r["n"].get<int>()) + " not pass");
    worst = std::max(worst, r["millis"].get<long long>());
  }
  o.check(wall <= 600, "wall time " + std::to_string(wall) + " s");
  o.check(worst <= 60000, "slowest cell " + std::to_string(worst) + " ms");
  if (o.ok) o.note = "36 cells pass, wall " + std::to_string(wall) + " s, slowest cell " + std::to_string(worst) + " ms";
  return o;
}

Outcome conservative_zero() {
  Outcome o;
  for (int n = 1; n <= 4; ++n) {
    o.check(is_zero(transport(build_map(MapKind::R_CH, n), gen_ch(n)[0].residual)), "E_CH0 image n=" + std::to_string(n));
    o.check(is_zero(transport(build_map(MapKind::R_Q, n), gen_qiao(n)[0].residual)), "E_Q0 image n=" + std::to_string(n));
    for (const char* id : {"C1", "C4"}) {
      const auto& r = cell(id, n);
      const Detail& d = r.details.front();
      o.check(d.status == Status::pass && d.terms == 0 && !d.cofactor, where(r) + " " + d.label);
    }
  }
  return o;
}

Outcome cofactors() {
  Outcome o;
  auto r4 = VarSpace::reciprocal(4);
  RatExpr c2 = 2 * parse("X_{T0}", r4).pow(-2), c4 = parse("x_{T0}", r4).pow(-1);
  int seen = 0;
  for (int n = 1; n <= 4; ++n) {
    auto ch = gen_ch(n);
    auto q = gen_qiao(n);
    auto bcbs = gen_cbs_family(n).bcbs;
    auto bmcbs = gen_mcbs_family(n).bmcbs;
    for (int i = 1; i < n; ++i) {
      auto a = proportional(transport(build_map(MapKind::R_CH, n), ch[static_cast<std::size_t>(i)].residual), bcbs[static_cast<std::size_t>(i - 1)].residual);
      o.check(a && *a == c2, "C2 cofactor n=" + std::to_string(n) + " i=" + std::to_string(i));
      const Detail* d = nullptr;
      for (const auto& x : cell("C4", n).details)
        if (x.label == "E_Q" + std::to_string(i)) d = &x;
      o.check(d && d->status == Status::pass && d->cofactor && parse(*d->cofactor, r4) == c4,
              "C4 cofactor n=" + std::to_string(n) + " i=" + std::to_string(i));
      ++seen;
    }
    o.check(n == 1 || cell("C2", n).cofactor == print_text(c2), "C2 report cofactor n=" + std::to_string(n));
    o.check(n == 1 || cell("C4", n).cofactor == print_text(c4), "C4 report cofactor n=" + std::to_string(n));
  }
  if (o.ok) o.note = std::to_string(seen) + " (n, i) pairs, cofactors " + print_text(c2) + " and " + print_text(c4);
  return o;
}

Outcome exact_zero_cells(const std::vector<std::string>& ids, int n_from) {
  Outcome o;
  for (const auto& id : ids) {
    if (n_from > 1) o.check(cell(id, 1).vacuous && cell(id, 1).status == Status::pass, id + " n=1 not vacuous");
    for (int n = n_from; n <= 4; ++n) {
      const auto& r = cell(id, n);
      o.check(r.status == Status::pass && !r.vacuous, where(r) + " status");
      for (const auto& d : r.details)
        if (d.status != Status::reported) o.check(d.terms == 0 && d.status == Status::pass, where(r) + " " + d.label);
    }
  }
  return o;
}

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(20261015);
  for (int k = 0; k < 1000 && o.ok; ++k) {
    VarSpace sp = gen::space(rng);
    RatExpr a = gen::expr(sp, rng), b = gen::expr(sp, rng), c = gen::expr(sp, rng);
    o.check(is_zero((a + b) + c - (a + (b + c))) && is_zero(a + b - (b + a)) && is_zero((a * b) * c - a * (b * c)) &&
                is_zero(a * b - b * a) && is_zero(a * (b + c) - (a * b + a * c)) && is_zero(a - a),
            "ring axioms case " + std::to_string(k));
    std::uniform_int_distribution<int> pick(0, sp.num_vars() - 1);
    Var u = sp.var(pick(rng)), v = sp.var(pick(rng));
    o.check(is_zero(total_derivative(a * b, u) - a * total_derivative(b, u) - b * total_derivative(a, u)),
            "Leibniz case " + std::to_string(k));
    o.check(is_zero(total_derivative(total_derivative(c, u), v) - total_derivative(total_derivative(c, v), u)),
            "derivative commutation case " + std::to_string(k));
    o.check(parse(print_text(a), sp) == a, "round trip case " + std::to_string(k) + ": " + print_text(a));
  }
  for (int n = 1; n <= 4; ++n) {
    auto ch = standard_system(StandardSystem::CH, n);
    auto q = standard_system(StandardSystem::QIAO, n);
    o.check(check_commutation(build_map(MapKind::R_CH, n), 50, 1), "R_CH commutation");
    o.check(check_commutation(build_map(MapKind::R_Q, n), 50, 2), "R_Q commutation");
    o.check(check_commutation(build_map(MapKind::C_MR, n), 50, 3), "C_MR commutation");
    o.check(check_commutation(build_map(MapKind::B_CH, n), 50, 4, &ch), "B_CH commutation");
    o.check(check_commutation(build_map(MapKind::B_Q, n), 50, 5, &q), "B_Q commutation");
  }
  if (o.ok) o.note = "1000 cases each; five maps commute for n = 1..4";
  return o;
}

Outcome numeric_oracle() {
  Outcome o;
  int zeros = 0;
  double worst = 0;
  for (const auto& r : suite())
    for (const auto& d : r.details) {
      if (d.status == Status::reported || d.label == "vacuous" || d.cofactor) continue;
      ++zeros;
      o.check(d.numeric.has_value(), where(r) + " " + d.label + " has no numeric confirmation");
      if (d.numeric) {
        worst = std::max(worst, *d.numeric);
        o.check(*d.numeric <= 1e-9, where(r) + " " + d.label + " numeric residual");
      }
    }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  int triples = 0;
  Real fd_worst = 0;
  for (int k = 0; triples < 200 && k < 400; ++k) {
    VarSpace sp = gen::space(rng);
    RatExpr e = gen::expr(sp, rng);
    Var v = sp.var(std::uniform_int_distribution<int>(0, sp.num_vars() - 1)(rng));
    TestFunction tf(sp.id(), sp.num_vars(), 1000 + static_cast<std::uint64_t>(k));
    std::vector<Real> at;
    for (int i = 0; i < sp.num_vars(); ++i) at.push_back(coord(rng));
    try {
      fd_worst = std::max(fd_worst, fd_check(e, v, tf, at));
      ++triples;
    } catch (const DenominatorTooSmall&) {
    }
  }
  o.check(triples == 200, "only " + std::to_string(triples) + " fd triples");
  o.check(fd_worst <= 1e-6L, "fd_check residual " + std::to_string(static_cast<double>(fd_worst)));

  // mutations
  auto img = transport(build_map(MapKind::R_CH, 3), gen_ch(3)[1].residual);
  auto target = gen_cbs_family(3).bcbs[0].residual;
  RatExpr cof = 2 * parse("X_{T0}", VarSpace::reciprocal(3)).pow(-2);
  o.check(numeric_proportionality(img, target, cof, 100, 11), "true cofactor rejected");
  o.check(!numeric_proportionality(img, target, cof * RatExpr(Rational(1001, 1000)), 100, 11), "perturbed cofactor accepted");
  o.check(!proportional(img + parse("X_{T0,T1}", VarSpace::reciprocal(3)), target), "perturbed image accepted");
  for (MapKind which : {MapKind::R_CH, MapKind::R_Q, MapKind::B_CH, MapKind::B_Q, MapKind::C_MR}) {
    auto m = build_map(which, 2);
    m.ops[1]->front().coefficient += 1;
    auto ch = standard_system(StandardSystem::CH, 2);
    auto q = standard_system(StandardSystem::QIAO, 2);
    const RewriteSystem* modulo = which == MapKind::B_CH ? &ch : which == MapKind::B_Q ? &q : nullptr;
    o.check(!check_commutation(m, 20, 7, modulo), std::string("corrupted ") + std::string(map_name(which)) + " accepted");
  }
  Transporter tr(build_map(MapKind::R_CH, 2));
  RatExpr broken = gen_ch(2)[0].residual + parse("1/100*P_{X}", VarSpace::ch(2));
  o.check(numeric_transport_residual(tr, broken, 20, 3) > 1e-9L, "broken residual confirmed as zero");

  if (o.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d zeros, worst %.1e; fd worst %.1e on 200 triples; mutations detected", zeros, worst,
                  static_cast<double>(fd_worst));
    o.note = buf;
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  fs::path a = workdir() / "a.json", b = workdir() / "b.json";
  int ca = run_cli("verify --claim all --n-max 4 --seed 3 --report " + a.string());
  int cb = run_cli("verify --claim all --n-max 4 --seed 3 --report " + b.string());
  o.check(ca == 0 && cb == 0, "verify exit codes " + std::to_string(ca) + ", " + std::to_string(cb));
  std::string sa = slurp(a), sb = slurp(b);
  o.check(!sa.empty() && sa == sb, "report files differ");
  if (o.ok) o.note = std::to_string(sa.size()) + " identical bytes";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"1 claim suite n<=4 within time limits", claim_suite},
      {"2 conservative equations transport to exact zero", conservative_zero},
      {"3 C2 and C4 cofactors", cofactors},
      {"4 C3 and C5 exact zeros", [] { return exact_zero_cells({"C3", "C5"}, 2); }},
      {"5 C9 exact zeros modulo CH", [] { return exact_zero_cells({"C9"}, 1); }},
      {"6 property suites and map commutation", property_suites},
      {"7 numeric oracle and mutations", numeric_oracle},
      {"8 byte-identical reports", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    failures += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << c.name << (o.note.empty() ? "" : ": " + o.note) << std::endl;
  }
  fs::remove_all(workdir());
  return failures;
}
