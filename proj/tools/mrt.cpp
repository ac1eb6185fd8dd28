// mrt: generate the hierarchies, run the claim suite, reduce and evaluate expressions.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 engine error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mrt/mrt.hpp"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kEngine = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<mrt::Equation> family_equations(const std::string& system, int n) {
  using namespace mrt;
  if (system == "ch") return gen_ch(n);
  if (system == "qiao") return gen_qiao(n);
  if (system == "bcbs") return gen_cbs_family(n).bcbs;
  if (system == "cbs") return gen_cbs_family(n).cbs;
  if (system == "msys") return gen_cbs_family(n).msys;
  if (system == "bmcbs") return gen_mcbs_family(n).bmcbs;
  if (system == "mcbs-sys") return gen_mcbs_family(n).msys;
  if (system == "miura") return gen_miura_relations(n);
  throw UsageError("unknown system '" + system + "'");
}

mrt::VarSpace space_by_name(const std::string& name, int n) {
  if (name == "ch" || name == "CH") return mrt::VarSpace::ch(n);
  if (name == "qiao" || name == "Q" || name == "q") return mrt::VarSpace::qiao(n);
  if (name == "reciprocal" || name == "R" || name == "r") return mrt::VarSpace::reciprocal(n);
  throw UsageError("unknown space '" + name + "'");
}

void check_n(int n) {
  if (n < 1 || n > mrt::kMaxN) throw UsageError("--n must be in 1.." + std::to_string(mrt::kMaxN));
}

mrt::Format format_or_throw(const std::string& f) {
  auto fmt = mrt::format_from_name(f);
  if (!fmt) throw UsageError("unknown format '" + f + "'");
  return *fmt;
}

int cmd_gen(const std::string& system, int n, const std::string& format) {
  check_n(n);
  auto fmt = format_or_throw(format);
  auto eqs = family_equations(system, n);
  if (fmt == mrt::Format::json) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : eqs) {
      nlohmann::json o;
      o["label"] = e.label;
      o["system"] = std::string(mrt::system_name(e.system));
      o["i"] = e.i ? nlohmann::json(*e.i) : nlohmann::json(nullptr);
      o["n"] = e.n;
      o["residual"] = mrt::to_json(e.residual);
      a.push_back(o);
    }
    std::cout << a.dump(2) << "\n";
    return kOk;
  }
  for (const auto& e : eqs) {
    if (fmt == mrt::Format::latex)
      std::cout << e.label << ": " << mrt::print_latex(e.residual) << " = 0\n";
    else
      std::cout << e.label << ": " << mrt::print_text(e.residual) << "\n";
  }
  return kOk;
}

std::vector<std::string> claim_selection(const std::string& sel) {
  if (sel == "all") return mrt::claim_ids();
  std::vector<std::string> ids;
  std::stringstream ss(sel);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!mrt::is_claim_id(tok)) throw UsageError("unknown claim '" + tok + "'");
    if (std::find(ids.begin(), ids.end(), tok) == ids.end()) ids.push_back(tok);
  }
  if (ids.empty()) throw UsageError("empty claim selection");
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct VerifyConfig {
  std::string claims = "all";
  int n_max = 4;
  std::string report;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  int trials = 100;
  bool timings = false;
  std::size_t step_cap = mrt::RewriteSystem::kDefaultStepCap;
};

int cmd_verify(const VerifyConfig& cfg) {
  if (cfg.n_max < 1 || cfg.n_max > mrt::kMaxN) throw UsageError("--n-max must be in 1.." + std::to_string(mrt::kMaxN));
  if (cfg.trials < 1) throw UsageError("--trials must be >= 1");
  auto ids = claim_selection(cfg.claims);
  mrt::ClaimOptions opt;
  opt.seed = cfg.seed;
  opt.trials = cfg.trials;
  opt.step_cap = cfg.step_cap;
  auto reports = mrt::run_all(cfg.n_max, ids, opt, cfg.jobs);

  std::string json = mrt::to_json(reports, cfg.timings).dump(2) + "\n";
  bool to_stdout = cfg.report.empty() || cfg.report == "-";
  if (to_stdout) {
    std::cout << json;
  } else {
    std::ofstream out(cfg.report, std::ios::binary);
    if (!out) throw UsageError("cannot write report to '" + cfg.report + "'");
    out << json;
  }

  std::ostream& table = to_stdout ? std::cerr : std::cout;
  bool failed = false, errored = false;
  long long total = 0;
  for (const auto& r : reports) {
    total += r.millis;
    table << r.claim << "  n=" << r.n << "  " << mrt::status_name(r.status) << (r.vacuous ? " (vacuous)" : "");
    if (r.cofactor) table << "  cofactor " << *r.cofactor;
    table << "  " << r.millis << " ms\n";
    for (const auto& d : r.details)
      if (d.status == mrt::Status::fail || d.status == mrt::Status::error) table << "    " << d.label << ": " << d.note << "\n";
    failed |= r.status == mrt::Status::fail;
    errored |= r.status == mrt::Status::error;
  }
  table << reports.size() << " cells, " << total << " ms of cell time\n";
  if (errored) return kEngine;
  return failed ? kFail : kOk;
}

int cmd_reduce(const std::string& system, int n, const std::string& expr, const std::string& format, bool shuffle,
               std::uint64_t seed, std::size_t step_cap) {
  check_n(n);
  auto fmt = format_or_throw(format);
  auto which = mrt::standard_system_from_name(system);
  if (!which) throw UsageError("unknown system '" + system + "'");
  auto sys = mrt::standard_system(*which, n);
  sys.set_step_cap(step_cap);
  mrt::SpaceId sp = *which == mrt::StandardSystem::CH ? mrt::SpaceId::CH
                    : *which == mrt::StandardSystem::QIAO ? mrt::SpaceId::Q
                                                          : mrt::SpaceId::R;
  auto e = mrt::parse(expr, mrt::VarSpace(sp, n));
  std::cout << mrt::print(mrt::reduce(sys, e, {shuffle, seed}), fmt) << "\n";
  return kOk;
}

int cmd_eval(const std::string& space, int n, const std::string& expr, std::uint64_t seed, int points) {
  check_n(n);
  if (points < 1) throw UsageError("--points must be >= 1");
  auto vs = space_by_name(space, n);
  auto e = mrt::parse(expr, vs);
  mrt::PointSampler sampler({{vs.id(), vs.num_vars()}}, seed);
  for (int k = 0; k < points; ++k) {
    mrt::JetPoint p = sampler.next();
    auto v = mrt::eval_scaled(e, p);
    std::ostringstream os;
    os.precision(17);
    os << static_cast<double>(v.value);
    std::cout << os.str() << "\t" << p.provenance() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camassa-Holm / Qiao hierarchy verification engine"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t term_cap = 200000, step_cap = mrt::RewriteSystem::kDefaultStepCap;
  app.add_option("--term-cap", term_cap, "Maximum number of terms in any intermediate polynomial")->capture_default_str();
  app.add_option("--step-cap", step_cap, "Maximum rewrite steps per reduction")->capture_default_str();

  std::string system, format = "text", expr, space = "ch";
  int n = 1;
  std::uint64_t seed = 0;

  auto* gen = app.add_subcommand("gen", "Print the equations of one family");
  gen->add_option("--system", system, "ch, qiao, bcbs, bmcbs, msys, mcbs-sys, cbs or miura")->required();
  gen->add_option("--n", n, "Number of components")->required();
  gen->add_option("--format", format, "text, latex or json")->capture_default_str();

  VerifyConfig vc;
  auto* verify = app.add_subcommand("verify", "Run the claim suite and write a report");
  verify->add_option("--claim", vc.claims, "'all' or a comma list of C1..C9")->capture_default_str();
  verify->add_option("--n-max", vc.n_max, "Run n = 1..n-max")->capture_default_str();
  verify->add_option("--report", vc.report, "Report path (standard output if omitted)");
  verify->add_option("--seed", vc.seed, "Seed for numeric confirmation")->capture_default_str();
  verify->add_option("--jobs", vc.jobs, "Worker threads (0 = available cores)")->capture_default_str();
  verify->add_option("--trials", vc.trials, "Numeric confirmation points per item")->capture_default_str();
  verify->add_flag("--timings", vc.timings, "Record cell durations in the report");

  bool shuffle = false;
  auto* red = app.add_subcommand("reduce", "Reduce an expression modulo a standard system");
  red->add_option("--system", system, "ch, bcbs or qiao")->required();
  red->add_option("--n", n, "Number of components")->required();
  red->add_option("--expr", expr, "Expression in the system's space")->required();
  red->add_option("--format", format, "text, latex or json")->capture_default_str();
  red->add_flag("--shuffle", shuffle, "Pick reducible jets and rules at random");
  red->add_option("--seed", seed, "Seed for --shuffle")->capture_default_str();

  int points = 1;
  auto* ev = app.add_subcommand("eval", "Evaluate an expression at seeded test-function points");
  ev->add_option("--space", space, "ch, qiao or reciprocal")->capture_default_str();
  ev->add_option("--n", n, "Number of components")->capture_default_str();
  ev->add_option("--expr", expr, "Expression")->required();
  ev->add_option("--seed", seed, "Seed")->capture_default_str();
  ev->add_option("--points", points, "Number of points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    mrt::set_term_cap(term_cap);
    if (*gen) return cmd_gen(system, n, format);
    vc.step_cap = step_cap;
    if (*verify) return cmd_verify(vc);
    if (*red) return cmd_reduce(system, n, expr, format, shuffle, seed, step_cap);
    if (*ev) return cmd_eval(space, n, expr, seed, points);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const mrt::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n  " << expr << "\n  " << std::string(e.span().begin, ' ')
              << std::string(std::max<std::size_t>(1, e.span().end - e.span().begin), '^') << "\n";
    return kUsage;
  } catch (const mrt::SwellError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kEngine;
  } catch (const mrt::StepCapError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kEngine;
  } catch (const mrt::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kEngine;
  }
  return kUsage;
}
