#pragma once

// Text grammar, plain/LaTeX printing, and a lossless JSON serialization.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" integer)?
//   base   := rational | jet | "(" expr ")" | "-" factor
//   jet    := name ("[" natural "]")? ("_" "{" varname ("," varname)* "}")?

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mrt/diffalg.hpp"

namespace mrt {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::vector<VarSpace> spaces) : s_(text), spaces_(std::move(spaces)) {}

  RatExpr parse() {
    RatExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input", pos_, pos_ + 1);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t b, std::size_t e) const {
    throw ParseError(what, {b, std::min(e, s_.size())});
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'", pos_, pos_ + 1);
  }

  RatExpr expr() {
    RatExpr acc = term();
    for (;;) {
      if (accept('+')) acc = acc + term();
      else if (accept('-')) acc = acc - term();
      else return acc;
    }
  }

  RatExpr term() {
    RatExpr acc = factor();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        acc = acc * factor();
      } else if (accept('/')) {
        RatExpr d = factor();
        if (d.is_zero()) fail("division by zero", at, pos_);
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  RatExpr factor() {
    skip_ws();
    std::size_t at = pos_;
    RatExpr b = base();
    if (accept('^')) {
      skip_ws();
      bool neg = accept('-');
      skip_ws();
      std::size_t numstart = pos_;
      Integer k = natural();
      if (!k.fits_slong_p()) fail("exponent too large", numstart, pos_);
      long e = k.get_si();
      if (neg) e = -e;
      if (b.is_zero() && e < 0) fail("zero raised to a negative power", at, pos_);
      return b.pow(e);
    }
    return b;
  }

  Integer natural() {
    skip_ws();
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected a number", b, b + 1);
    return Integer(std::string(s_.substr(b, pos_ - b)));
  }

  RatExpr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input", pos_, pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatExpr e = expr();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return RatExpr(Rational(natural()));
    if (std::isalpha(static_cast<unsigned char>(c))) return jet();
    fail(std::string("unexpected character '") + c + "'", pos_, pos_ + 1);
  }

  RatExpr jet() {
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string name(s_.substr(b, pos_ - b));
    std::optional<std::uint8_t> fam;
    const VarSpace* found = nullptr;
    for (const auto& sp : spaces_) {
      if ((fam = sp.find_family(name))) {
        found = &sp;
        break;
      }
    }
    if (!fam) {
      for (const auto& sp : spaces_)
        if (sp.find_var(name)) fail("independent variable " + name + " used as a field", b, pos_);
      fail("unknown field " + name + " in space " + space_names(), b, pos_);
    }
    const VarSpace& space = *found;
    int index = 0;
    std::size_t idx_begin = pos_;
    if (pos_ < s_.size() && s_[pos_] == '[') {
      ++pos_;
      Integer k = natural();
      if (!accept(']')) fail("expected ']'", pos_, pos_ + 1);
      if (!k.fits_sint_p()) fail("index out of range", idx_begin, pos_);
      index = static_cast<int>(k.get_si());
    }
    const auto& info = family_info(space.id(), *fam);
    if (info.indexed && index == 0) fail("field " + name + " requires an index", b, pos_);
    if (!info.indexed && index != 0) fail("field " + name + " takes no index", b, pos_);
    if (info.indexed && (index < 1 || index > space.n()))
      fail("index " + std::to_string(index) + " out of range 1.." + std::to_string(space.n()), idx_begin, pos_);
    Jet j(space.field(*fam, index));
    if (pos_ < s_.size() && s_[pos_] == '_') {
      ++pos_;
      if (pos_ >= s_.size() || s_[pos_] != '{') fail("expected '{' after '_'", pos_, pos_ + 1);
      ++pos_;
      bool any = false;
      for (;;) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '}') {
          ++pos_;
          break;
        }
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        // longest variable name matching here
        std::size_t best = 0;
        std::optional<Var> bestv;
        for (int v = 0; v < space.num_vars(); ++v) {
          std::string vn = var_name(space.id(), v);
          if (s_.substr(pos_, vn.size()) == vn && vn.size() > best) {
            best = vn.size();
            bestv = space.var(v);
          }
        }
        if (!bestv) {
          std::size_t e = pos_;
          while (e < s_.size() && std::isalnum(static_cast<unsigned char>(s_[e]))) ++e;
          if (e == pos_) fail("expected a variable name", pos_, pos_ + 1);
          fail("unknown variable " + std::string(s_.substr(pos_, e - pos_)) + " in space " +
                   std::string(space.name()),
               pos_, e);
        }
        j = j.derivative(bestv->index);
        pos_ += best;
        any = true;
      }
      if (!any) fail("empty derivative list", b, pos_);
    }
    return RatExpr(j);
  }

  std::string space_names() const {
    std::string out;
    for (const auto& sp : spaces_) out += (out.empty() ? "" : "+") + std::string(sp.name());
    return out;
  }

  std::string_view s_;
  std::vector<VarSpace> spaces_;
  std::size_t pos_ = 0;
};

inline std::string rational_text(const Rational& c) {
  return c.get_den() == 1 ? c.get_num().get_str() : c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline std::string monomial_text(const Monomial& m) {
  std::string s;
  for (auto& [j, e] : m.factors()) {
    if (!s.empty()) s += "*";
    s += jet_text(j);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

// Terms printed from the leading monomial down.
inline std::string poly_text(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    if (first) s += c < 0 ? "-" : "";
    else s += c < 0 ? " - " : " + ";
    first = false;
    if (m.is_one()) {
      s += rational_text(a);
    } else {
      if (a != 1) s += rational_text(a) + "*";
      s += monomial_text(m);
    }
  }
  return s;
}

inline std::string rational_latex(const Rational& c) {
  return c.get_den() == 1 ? c.get_num().get_str()
                          : "\\frac{" + c.get_num().get_str() + "}{" + c.get_den().get_str() + "}";
}

inline std::string poly_latex(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    if (first) s += c < 0 ? "-" : "";
    else s += c < 0 ? " - " : " + ";
    first = false;
    if (a != 1 || m.is_one()) s += rational_latex(a);
    bool firstf = true;
    for (auto& [j, e] : m.factors()) {
      if (!firstf || a != 1) s += " ";
      s += jet_latex(j);
      if (e > 1) s += "^{" + std::to_string(e) + "}";
      firstf = false;
    }
  }
  return s;
}

inline nlohmann::json jet_json(const Jet& j) {
  nlohmann::json o;
  o["f"] = std::string(j.field.name());
  if (j.field.indexed()) o["i"] = j.field.index;
  nlohmann::json d = nlohmann::json::array();
  for (int v = 0; v < kMaxVars; ++v)
    for (int k = 0; k < j.d[v]; ++k) d.push_back(var_name(j.space(), v));
  o["d"] = d;
  return o;
}

inline nlohmann::json poly_json(const DiffPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [m, c] : p.terms()) {
    nlohmann::json factors = nlohmann::json::array();
    for (auto& [j, e] : m.factors()) factors.push_back({{"jet", jet_json(j)}, {"e", e}});
    terms.push_back({{"c", rational_text(c)}, {"m", factors}});
  }
  return terms;
}

}  // namespace detail

/// Parses `input` as an expression on `space`.
inline RatExpr parse(std::string_view input, const VarSpace& space) { return detail::Parser(input, {space}).parse(); }

/// Parses an expression whose jets may come from several spaces; field names
/// are looked up in order.
inline RatExpr parse(std::string_view input, std::vector<VarSpace> spaces) {
  return detail::Parser(input, std::move(spaces)).parse();
}

enum class Format { text, latex, json };

inline std::string print_text(const RatExpr& e) {
  if (e.den().is_constant()) return detail::poly_text(e.num().scaled(1 / e.den().constant_value()));
  std::string n = detail::poly_text(e.num());
  std::string d = detail::poly_text(e.den());
  if (e.num().size() > 1) n = "(" + n + ")";
  const auto& [lm, lc] = e.den().leading();
  bool single_jet = e.den().size() == 1 && lc == 1 && lm.factors().size() == 1 && lm.factors()[0].second == 1;
  if (!single_jet) d = "(" + d + ")";
  return n + "/" + d;
}

inline std::string print_latex(const RatExpr& e) {
  if (e.den().is_constant()) return detail::poly_latex(e.num().scaled(1 / e.den().constant_value()));
  return "\\frac{" + detail::poly_latex(e.num()) + "}{" + detail::poly_latex(e.den()) + "}";
}

/// Lossless tree form: {"space", "num": [terms], "den": [terms]}.
inline nlohmann::json to_json(const RatExpr& e) {
  auto sp = spaces_of(e);
  nlohmann::json o;
  nlohmann::json spaces = nlohmann::json::array();
  for (auto s : sp) spaces.push_back(std::string(space_name(s)));
  o["spaces"] = spaces;
  o["num"] = detail::poly_json(e.num());
  o["den"] = detail::poly_json(e.den());
  return o;
}

inline std::string print_json(const RatExpr& e) { return to_json(e).dump(); }

inline std::string print(const RatExpr& e, Format f) {
  switch (f) {
    case Format::text: return print_text(e);
    case Format::latex: return print_latex(e);
    case Format::json: return print_json(e);
  }
  return {};
}

/// Inverse of to_json. Field and variable names are resolved against `spaces`
/// (the first space declaring the name wins), so mixed expressions need all
/// their spaces listed.
inline RatExpr from_json(const nlohmann::json& o, int n) {
  std::vector<VarSpace> spaces;
  for (const auto& s : o.at("spaces")) {
    auto id = space_from_name(s.get<std::string>());
    if (!id) throw DomainError("unknown space in json: " + s.get<std::string>());
    spaces.emplace_back(*id, n);
  }
  auto read_jet = [&](const nlohmann::json& jj) {
    auto name = jj.at("f").get<std::string>();
    int idx = jj.contains("i") ? jj.at("i").get<int>() : 0;
    for (const auto& sp : spaces) {
      auto fam = sp.find_family(name);
      if (!fam) continue;
      Jet j(sp.field(*fam, idx));
      for (const auto& v : jj.at("d")) j = j.derivative(sp.var(v.get<std::string>()).index);
      return j;
    }
    throw DomainError("unknown field in json: " + name);
  };
  auto read_poly = [&](const nlohmann::json& arr) {
    DiffPoly p;
    for (const auto& t : arr) {
      Monomial m;
      for (const auto& f : t.at("m")) m = m * Monomial(read_jet(f.at("jet")), f.at("e").get<std::uint32_t>());
      p.add_term(m, Rational(t.at("c").get<std::string>()));
    }
    return p;
  };
  DiffPoly num = read_poly(o.at("num"));
  DiffPoly den = read_poly(o.at("den"));
  return RatExpr(std::move(num), std::move(den));
}

inline std::optional<Format> format_from_name(std::string_view s) {
  if (s == "text") return Format::text;
  if (s == "latex") return Format::latex;
  if (s == "json") return Format::json;
  return std::nullopt;
}

}  // namespace mrt
