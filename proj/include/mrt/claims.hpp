#pragma once

// The nine verification procedures and their reports.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "mrt/numoracle.hpp"

namespace mrt {

enum class Status { pass, fail, error, reported };

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::error: return "error";
    case Status::reported: return "reported";
  }
  return "?";
}

struct Detail {
  std::string label;
  Status status = Status::pass;
  std::string note;
  std::optional<std::string> cofactor;
  std::size_t terms = 0;
  std::optional<std::string> image;
  std::optional<double> numeric;
};

struct VerificationReport {
  std::string claim;
  int n = 1;
  Status status = Status::pass;
  bool vacuous = false;
  std::optional<std::string> cofactor;
  std::size_t terms = 0;
  long long millis = 0;
  std::vector<Detail> details;
};

struct ClaimOptions {
  std::uint64_t seed = 0;
  int trials = 100;
  Real tolerance = 1e-9L;
  std::size_t step_cap = RewriteSystem::kDefaultStepCap;
};

inline const std::vector<std::string>& claim_ids() {
  static const std::vector<std::string> ids{"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"};
  return ids;
}

inline bool is_claim_id(std::string_view s) {
  const auto& ids = claim_ids();
  return std::find(ids.begin(), ids.end(), s) != ids.end();
}

namespace detail {

inline std::string fmt_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Collects details for one cell and evaluates them safely.
class Cell {
 public:
  Cell(std::string claim, int n, const ClaimOptions& opt) : opt_(opt) {
    rep_.claim = std::move(claim);
    rep_.n = n;
  }

  const ClaimOptions& opt() const { return opt_; }
  int n() const { return rep_.n; }

  /// Deterministic per-detail seed.
  std::uint64_t seed(std::size_t k) const {
    std::uint64_t h = opt_.seed * 0x9E3779B97F4A7C15ULL;
    for (char c : rep_.claim) h = h * 131 + static_cast<unsigned char>(c);
    return h * 1315423911ULL + static_cast<std::uint64_t>(rep_.n) * 977 + k;
  }

  /// Runs `fn` for one judged item, turning engine errors into an error detail.
  void item(const std::string& label, const std::function<void(Detail&)>& fn) {
    Detail d;
    d.label = label;
    try {
      fn(d);
    } catch (const std::exception& e) {
      d.status = Status::error;
      d.note = e.what();
    }
    rep_.details.push_back(std::move(d));
  }

  /// Symbolic zero plus numeric confirmation.
  void zero(Detail& d, const RatExpr& residual, const std::function<Real()>& numeric) {
    d.terms = residual.is_zero() ? 0 : residual.num().size();
    if (!residual.is_zero()) {
      d.status = Status::fail;
      d.note = "residual does not vanish";
      d.image = print_text(residual);
      return;
    }
    confirm(d, numeric());
  }

  void confirm(Detail& d, Real numeric) {
    d.numeric = static_cast<double>(numeric);
    if (numeric > opt_.tolerance) {
      d.status = Status::fail;
      d.note = "numeric confirmation failed: relative residual " + fmt_sci(static_cast<double>(numeric));
    }
  }

  void vacuous() {
    rep_.vacuous = true;
    Detail d;
    d.label = "vacuous";
    d.note = "index range 1..n-1 is empty for n = " + std::to_string(rep_.n);
    rep_.details.push_back(std::move(d));
  }

  /// Requires the cofactors of all proportionality details to agree.
  void same_cofactor() {
    std::optional<std::string> first;
    for (const auto& d : rep_.details)
      if (d.cofactor && d.status != Status::reported) {
        if (!first) first = d.cofactor;
        else if (*first != *d.cofactor) {
          Detail bad;
          bad.label = "cofactor agreement";
          bad.status = Status::fail;
          bad.note = "cofactors differ across i: " + *first + " vs " + *d.cofactor;
          rep_.details.push_back(std::move(bad));
          return;
        }
      }
    rep_.cofactor = first;
  }

  VerificationReport finish() {
    rep_.status = Status::pass;
    for (const auto& d : rep_.details) {
      if (d.status == Status::error) rep_.status = Status::error;
      else if (d.status == Status::fail && rep_.status != Status::error) rep_.status = Status::fail;
      rep_.terms += d.status == Status::reported ? 0 : d.terms;
    }
    return std::move(rep_);
  }

 private:
  VerificationReport rep_;
  ClaimOptions opt_;
};

inline std::shared_ptr<const RewriteSystem> shared_system(StandardSystem which, int n, const ClaimOptions& opt) {
  auto sys = std::make_shared<RewriteSystem>(standard_system(which, n));
  sys->set_step_cap(opt.step_cap);
  return sys;
}

// Proportionality detail: symbolic cofactor plus numeric spot check.
inline void proportional_item(Cell& cell, Detail& d, const RatExpr& img, const RatExpr& target, std::size_t k) {
  if (img.is_zero() || target.is_zero()) {
    d.status = Status::fail;
    d.note = "zero expression where a nonzero multiple was expected";
    return;
  }
  auto c = proportional(img, target);
  if (!c) {
    d.status = Status::fail;
    d.note = "not proportional";
    d.terms = img.num().size();
    return;
  }
  d.cofactor = print_text(*c);
  cell.confirm(d, numeric_proportionality(img, target, *c, cell.opt().trials, cell.seed(k), cell.opt().tolerance)
                      ? 0
                      : 1);
  if (d.status == Status::fail) d.note = "numeric proportionality check failed";
}

inline void report_image(Detail& d, const RatExpr& img) {
  d.status = Status::reported;
  d.image = print_text(img);
  d.terms = img.num().size();
  d.note = "image computed and reported, not judged";
}

// Substitution helper: image for jets of one family, nothing for others.
using JetImage = std::function<std::optional<RatExpr>(const Jet&)>;

inline RatExpr repeat_derivative(RatExpr e, const Jet& j, const Jet& base) {
  for (int v = 0; v < kMaxVars; ++v)
    for (int k = base.d[v]; k < j.d[v]; ++k) e = total_derivative(e, Var{j.space(), static_cast<std::uint8_t>(v)});
  return e;
}

}  // namespace detail

/// C1: the conservative CH equation is identically satisfied after the reciprocal change.
inline VerificationReport claim_c1(int n, const ClaimOptions& opt) {
  detail::Cell cell("C1", n, opt);
  cell.item("E_CH0", [&](Detail& d) {
    Transporter tr(build_map(MapKind::R_CH, n));
    auto e = gen_ch(n).front().residual;
    cell.zero(d, tr(e), [&] { return numeric_transport_residual(tr, e, opt.trials, cell.seed(0)); });
  });
  return cell.finish();
}

/// C2: the remaining CH equations become copies of the same reciprocal system.
inline VerificationReport claim_c2(int n, const ClaimOptions& opt) {
  detail::Cell cell("C2", n, opt);
  auto ch = gen_ch(n);
  auto fam = gen_cbs_family(n);
  Transporter tr(build_map(MapKind::R_CH, n));
  if (n < 2) cell.vacuous();
  for (int i = 1; i < n; ++i)
    cell.item("E_CH" + std::to_string(i), [&](Detail& d) {
      detail::proportional_item(cell, d, tr(ch[static_cast<std::size_t>(i)].residual), fam.bcbs[static_cast<std::size_t>(i - 1)].residual,
                                static_cast<std::size_t>(i));
    });
  cell.same_cofactor();
  cell.item("E_CHn image", [&](Detail& d) { detail::report_image(d, tr(ch.back().residual)); });
  return cell.finish();
}

/// M-jet images from the potential system: M_{T0} = B/4, M_{Ti} = -X_{T(i+1)}/(4 X_{T0}).
inline RatExpr m_jet_image(const Jet& j, int n) {
  Fields F(n);
  if (j.d[0] >= 1) {
    Jet base = F.Mjet({0});
    return detail::repeat_derivative(Rational(1, 4) * F.B(), j, base);
  }
  for (int i = 1; i < n; ++i)
    if (j.d[i] >= 1) {
      Jet base = F.Mjet({i});
      RatExpr img = Rational(-1, 4) * RatExpr(F.Xjet({i + 1})) / RatExpr(F.Xjet({0}));
      return detail::repeat_derivative(img, j, base);
    }
  throw DomainError("no potential image for " + jet_text(j));
}

/// C3: the CBS equations hold as the compatibility of the potential system with bCBS.
inline VerificationReport claim_c3(int n, const ClaimOptions& opt) {
  detail::Cell cell("C3", n, opt);
  if (n < 2) {
    cell.vacuous();
    return cell.finish();
  }
  auto fam = gen_cbs_family(n);
  auto sys = detail::shared_system(StandardSystem::BCBS, n, opt);
  for (int i = 1; i < n; ++i)
    cell.item("CBS" + std::to_string(i), [&](Detail& d) {
      RatExpr sub = substitute(fam.cbs[static_cast<std::size_t>(i - 1)].residual,
                               [&](const Jet& j) -> std::optional<RatExpr> {
                                 if (j.field.family == family::M) return m_jet_image(j, n);
                                 return std::nullopt;
                               });
      cell.zero(d, reduce(*sys, sub),
                [&] { return numeric_zero_residual(sub, opt.trials, cell.seed(static_cast<std::size_t>(i)), sys, n + 1); });
    });
  return cell.finish();
}

/// C4: the Qiao hierarchy in reciprocal variables.
inline VerificationReport claim_c4(int n, const ClaimOptions& opt) {
  detail::Cell cell("C4", n, opt);
  Fields F(n);
  auto q = gen_qiao(n);
  auto fam = gen_mcbs_family(n);
  Transporter tr(build_map(MapKind::R_Q, n));
  cell.item("E_Q0", [&](Detail& d) {
    cell.zero(d, tr(q[0].residual), [&] { return numeric_transport_residual(tr, q[0].residual, opt.trials, cell.seed(0)); });
  });
  for (int i = 1; i < n; ++i)
    cell.item("E_Q" + std::to_string(i), [&](Detail& d) {
      detail::proportional_item(cell, d, tr(q[static_cast<std::size_t>(i)].residual), fam.bmcbs[static_cast<std::size_t>(i - 1)].residual,
                                static_cast<std::size_t>(i));
    });
  cell.same_cofactor();
  cell.item("D_x(E_Qn) image", [&](Detail& d) { detail::report_image(d, tr(F.Dx(q[static_cast<std::size_t>(n)].residual))); });
  RatExpr x0 = F.xjet({0});
  for (int i = 1; i < n; ++i)
    cell.item("m-system cross-derivative " + std::to_string(i), [&](Detail& d) {
      RatExpr m0 = Rational(1, 2) * x0 * x0;
      RatExpr mi = RatExpr(F.xjet({i + 1})) / x0 + RatExpr(F.xjet({i, 0, 0})) / x0;
      RatExpr cross = F.D(m0, i) - F.D(mi, 0);
      auto target = fam.bmcbs[static_cast<std::size_t>(i - 1)].residual;
      auto c = proportional(cross, target);
      if (!c || !c->is_constant()) {
        d.status = Status::fail;
        d.note = "cross-derivative is not a constant multiple of bmCBS";
        return;
      }
      d.note = "constant multiple " + print_text(*c);
      cell.confirm(d, numeric_zero_residual(cross - *c * target, opt.trials, cell.seed(100 + static_cast<std::size_t>(i)), nullptr, n + 1));
    });
  for (int i = 1; i <= n; ++i)
    cell.item("E_Qw" + std::to_string(i), [&](Detail& d) {
      const auto& e = q[static_cast<std::size_t>(n + i)].residual;
      cell.zero(d, tr(e), [&] { return numeric_transport_residual(tr, e, opt.trials, cell.seed(200 + static_cast<std::size_t>(i))); });
    });
  return cell.finish();
}

/// x-jet images at the reciprocal level: T0-derivatives of x from
/// x_{T0} = X_{T0,T0}/X_{T0} + X_{T0}, and x_{T(i+1)} from the mixed relation.
inline RatExpr x_jet_image(const Jet& j, int n) {
  Fields F(n);
  RatExpr S = F.S();
  if (j.d[0] >= 1) return detail::repeat_derivative(S, j, F.xjet({0}));
  for (int i = 1; i < n; ++i) {
    Jet target = F.xjet({i + 1});
    if (j == target) {
      // x_{i+1} = x0 x_{0i} - x_{00i} + x0 X_{i+1}/X0, with every x-jet carrying a T0-derivative
      RatExpr X0 = F.Xjet({0});
      return S * F.D(S, i) - F.D(F.D(S, 0), i) + S * RatExpr(F.Xjet({i + 1})) / X0;
    }
  }
  throw DomainError("no Miura image for " + jet_text(j));
}

/// C5: the b-mCBS system follows from bCBS under the Miura relations.
inline VerificationReport claim_c5(int n, const ClaimOptions& opt) {
  detail::Cell cell("C5", n, opt);
  if (n < 2) {
    cell.vacuous();
    return cell.finish();
  }
  auto fam = gen_mcbs_family(n);
  auto sys = detail::shared_system(StandardSystem::BCBS, n, opt);
  for (int i = 1; i < n; ++i)
    cell.item("bmCBS" + std::to_string(i), [&](Detail& d) {
      RatExpr sub = substitute(fam.bmcbs[static_cast<std::size_t>(i - 1)].residual,
                               [&](const Jet& j) -> std::optional<RatExpr> {
                                 if (j.field.family == family::x) return x_jet_image(j, n);
                                 return std::nullopt;
                               });
      cell.zero(d, reduce(*sys, sub),
                [&] { return numeric_zero_residual(sub, opt.trials, cell.seed(static_cast<std::size_t>(i)), sys, n + 1); });
    });
  return cell.finish();
}

/// C6: the heights relation x_0 = X_00/X_0 + X_0 read back on the CH and Qiao sides.
inline VerificationReport claim_c6(int n, const ClaimOptions& opt) {
  detail::Cell cell("C6", n, opt);
  Fields F(n);
  cell.item("HEIGHTS", [&](Detail& d) {
    Transporter bch(build_map(MapKind::B_CH, n)), bq(build_map(MapKind::B_Q, n));
    RatExpr r = RatExpr(F.xjet({0})) - F.S();
    RatExpr img = substitute(r, [&](const Jet& j) -> std::optional<RatExpr> {
      return j.field.family == family::X ? bch.image(j) : bq.image(j);
    });
    RatExpr heights;
    for (const auto& e : gen_miura_relations(n))
      if (e.label == "HEIGHTS") heights = e.residual;
    detail::proportional_item(cell, d, img, heights, 0);
  });
  cell.same_cofactor();
  return cell.finish();
}

/// C7: the field relations under the composite map.
inline VerificationReport claim_c7(int n, const ClaimOptions& opt) {
  detail::Cell cell("C7", n, opt);
  Fields F(n);
  auto sys = detail::shared_system(StandardSystem::CH, n, opt);
  Transporter tr(build_map(MapKind::C_MR, n), true);
  for (int i = 1; i < n; ++i) {
    cell.item("FIELDS" + std::to_string(i) + "a", [&](Detail& d) {
      // v_i = v_i_xx + u w_{i+1}: the integrated middle Qiao equation, constant zero
      RatExpr v = F.v(i);
      RatExpr vx = F.Dx(v);
      RatExpr residual = F.P() * F.Omega(i + 1) - 2 * (F.Dx(vx) + F.u() * F.w(i + 1) - vx);
      cell.zero(d, reduce(*sys, tr(residual)), [&] {
        return numeric_transport_residual(tr, residual, opt.trials, cell.seed(static_cast<std::size_t>(i)), sys);
      });
    });
    cell.item("FIELDS" + std::to_string(i) + "b", [&](Detail& d) {
      RatExpr Om = F.Omega(i + 1);
      RatExpr residual = F.w(i + 1) - Rational(1, 2) * (F.DX(Om) + Om);
      cell.zero(d, tr(residual), [&] {
        return numeric_transport_residual(tr, residual, opt.trials, cell.seed(100 + static_cast<std::size_t>(i)));
      });
    });
    cell.item("field chain " + std::to_string(i), [&](Detail& d) {
      // P Omega/(2u) + (P Omega)_X/(2P) with the image of u is (Omega_X + Omega)/2
      RatExpr Om = F.Omega(i + 1), P = F.P();
      RatExpr chain = P * Om / (2 * F.u()) + F.DX(P * Om) / (2 * P) - Rational(1, 2) * (F.DX(Om) + Om);
      cell.zero(d, tr(chain), [&] {
        return numeric_transport_residual(tr, chain, opt.trials, cell.seed(200 + static_cast<std::size_t>(i)));
      });
    });
  }
  cell.item("CROSSD", [&](Detail& d) {
    RatExpr Om = F.Omega(1);
    RatExpr residual = F.w(1) - Rational(1, 2) * (F.DX(Om) + Om);
    cell.zero(d, tr(residual), [&] { return numeric_transport_residual(tr, residual, opt.trials, cell.seed(300)); });
  });
  return cell.finish();
}

/// C8: closedness of dx = (1 - P_X/P) dX + (w1 - Omega1/2 (1 - P_X/P)) dT on CH solutions.
inline VerificationReport claim_c8(int n, const ClaimOptions& opt) {
  detail::Cell cell("C8", n, opt);
  Fields F(n);
  auto sys = detail::shared_system(StandardSystem::CH, n, opt);
  RatExpr P = F.P(), Om = F.Omega(1);
  RatExpr ratio = 1 - F.DX(P) / P;
  RatExpr w_img = Rational(1, 2) * (F.DX(Om) + Om);
  cell.item("d2x", [&](Detail& d) {
    RatExpr cross = F.DT(ratio) - F.DX(w_img - Rational(1, 2) * Om * ratio);
    cell.zero(d, reduce(*sys, cross), [&] { return numeric_zero_residual(cross, opt.trials, cell.seed(0), sys); });
  });
  cell.item("XREL", [&](Detail& d) {
    Transporter tr(build_map(MapKind::C_MR, n), true);
    RatExpr xrel;
    for (const auto& e : gen_miura_relations(n))
      if (e.label == "XREL") xrel = e.residual;
    cell.zero(d, reduce(*sys, tr(xrel)), [&] { return numeric_transport_residual(tr, xrel, opt.trials, cell.seed(1), sys); });
  });
  return cell.finish();
}

/// C9: every Qiao(n) equation maps to a consequence of CH(n).
inline VerificationReport claim_c9(int n, const ClaimOptions& opt) {
  detail::Cell cell("C9", n, opt);
  Fields F(n);
  auto sys = detail::shared_system(StandardSystem::CH, n, opt);
  Transporter tr(build_map(MapKind::C_MR, n));
  auto q = gen_qiao(n);
  for (std::size_t k = 0; k < q.size(); ++k) {
    bool last = q[k].label == "E_Qn";
    RatExpr e = last ? F.Dx(q[k].residual) : q[k].residual;
    cell.item(last ? "D_x(E_Qn)" : q[k].label, [&](Detail& d) {
      cell.zero(d, reduce(*sys, tr(e)), [&] { return numeric_transport_residual(tr, e, opt.trials, cell.seed(k), sys); });
    });
  }
  return cell.finish();
}

inline VerificationReport run_claim(const std::string& id, int n, const ClaimOptions& opt = {}) {
  require_n(n);
  auto start = std::chrono::steady_clock::now();
  if (!is_claim_id(id)) throw DomainError("unknown claim " + id);
  VerificationReport r;
  try {
    if (id == "C1") r = claim_c1(n, opt);
    else if (id == "C2") r = claim_c2(n, opt);
    else if (id == "C3") r = claim_c3(n, opt);
    else if (id == "C4") r = claim_c4(n, opt);
    else if (id == "C5") r = claim_c5(n, opt);
    else if (id == "C6") r = claim_c6(n, opt);
    else if (id == "C7") r = claim_c7(n, opt);
    else if (id == "C8") r = claim_c8(n, opt);
    else r = claim_c9(n, opt);
  } catch (const std::exception& e) {
    // failures while building the equations themselves
    r = VerificationReport{};
    r.claim = id;
    r.n = n;
    r.status = Status::error;
    Detail d;
    d.label = "setup";
    d.status = Status::error;
    d.note = e.what();
    r.details.push_back(std::move(d));
  }
  r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Runs the selected claims for n = 1..n_max on `jobs` worker threads.
/// Reports are ordered by (claim, n) whatever the schedule.
inline std::vector<VerificationReport> run_all(int n_max, const std::vector<std::string>& ids = claim_ids(),
                                               const ClaimOptions& opt = {}, unsigned jobs = 0) {
  if (n_max < 1 || n_max > kMaxN) throw DomainError("n_max must be in 1.." + std::to_string(kMaxN));
  for (const auto& id : ids)
    if (!is_claim_id(id)) throw DomainError("unknown claim " + id);
  std::vector<std::pair<std::string, int>> cells;
  for (const auto& id : ids)
    for (int n = 1; n <= n_max; ++n) cells.emplace_back(id, n);
  std::vector<VerificationReport> out(cells.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  // largest cells first
  std::vector<std::size_t> order(cells.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a].second > cells[b].second; });
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < order.size();) {
      auto [id, n] = cells[order[k]];
      out[order[k]] = run_claim(id, n, opt);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return std::tie(a.claim, a.n) < std::tie(b.claim, b.n); });
  return out;
}

inline nlohmann::json to_json(const Detail& d) {
  nlohmann::json o;
  o["label"] = d.label;
  o["status"] = std::string(status_name(d.status));
  if (d.cofactor) o["cofactor"] = *d.cofactor;
  o["terms"] = d.terms;
  if (!d.note.empty()) o["note"] = d.note;
  if (d.image) o["image"] = *d.image;
  if (d.numeric) o["numeric_residual"] = detail::fmt_sci(*d.numeric);
  return o;
}

/// One report record. Timings are omitted (null) unless requested, so that
/// reports are byte-identical across runs.
inline nlohmann::json to_json(const VerificationReport& r, bool timings = false) {
  nlohmann::json o;
  o["claim"] = r.claim;
  o["n"] = r.n;
  o["status"] = std::string(status_name(r.status));
  if (r.vacuous) o["vacuous"] = true;
  o["cofactor"] = r.cofactor ? nlohmann::json(*r.cofactor) : nlohmann::json(nullptr);
  o["terms"] = r.terms;
  o["millis"] = timings ? nlohmann::json(r.millis) : nlohmann::json(nullptr);
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& d : r.details) ds.push_back(to_json(d));
  o["details"] = ds;
  return o;
}

inline nlohmann::json to_json(const std::vector<VerificationReport>& rs, bool timings = false) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rs) a.push_back(to_json(r, timings));
  return a;
}

}  // namespace mrt
