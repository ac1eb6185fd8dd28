#pragma once

// Variable spaces: the Camassa-Holm space (X, T), the Qiao space (x, t) and the
// reciprocal space (T0..Tn). Variable names do not depend on n, so jets can be
// printed without a VarSpace at hand; a VarSpace instance validates indices.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrt/errors.hpp"

namespace mrt {

inline constexpr int kMaxVars = 16;
inline constexpr int kMaxN = kMaxVars - 1;

enum class SpaceId : std::uint8_t { CH = 0, Q = 1, R = 2 };

/// Field families, numbered per space in priority order.
namespace family {
inline constexpr std::uint8_t P = 0, Omega = 1;             // CH
inline constexpr std::uint8_t u = 0, v = 1, w = 2;          // Q
inline constexpr std::uint8_t X = 0, x = 1, M = 2, m = 3;   // R
}  // namespace family

struct FamilyInfo {
  std::string_view name;
  std::string_view latex;
  bool indexed;
};

namespace detail {
inline constexpr std::array<FamilyInfo, 2> kChFamilies{{{"P", "P", false}, {"Omega", "\\Omega", true}}};
inline constexpr std::array<FamilyInfo, 3> kQFamilies{{{"u", "u", false}, {"v", "v", true}, {"w", "\\omega", true}}};
inline constexpr std::array<FamilyInfo, 4> kRFamilies{
    {{"X", "X", false}, {"x", "x", false}, {"M", "M", false}, {"m", "m", false}}};
}  // namespace detail

inline std::size_t family_count(SpaceId s) {
  switch (s) {
    case SpaceId::CH: return detail::kChFamilies.size();
    case SpaceId::Q: return detail::kQFamilies.size();
    case SpaceId::R: return detail::kRFamilies.size();
  }
  return 0;
}

inline const FamilyInfo& family_info(SpaceId s, std::uint8_t f) {
  if (f >= family_count(s)) throw DomainError("unknown field family");
  switch (s) {
    case SpaceId::CH: return detail::kChFamilies[f];
    case SpaceId::Q: return detail::kQFamilies[f];
    case SpaceId::R: break;
  }
  return detail::kRFamilies[f];
}

inline std::string_view space_name(SpaceId s) {
  switch (s) {
    case SpaceId::CH: return "CH";
    case SpaceId::Q: return "Q";
    case SpaceId::R: return "R";
  }
  return "?";
}

inline std::optional<SpaceId> space_from_name(std::string_view s) {
  if (s == "CH" || s == "ch") return SpaceId::CH;
  if (s == "Q" || s == "q" || s == "qiao") return SpaceId::Q;
  if (s == "R" || s == "r") return SpaceId::R;
  return std::nullopt;
}

inline std::string var_name(SpaceId s, int idx) {
  switch (s) {
    case SpaceId::CH: return idx == 0 ? "X" : "T";
    case SpaceId::Q: return idx == 0 ? "x" : "t";
    case SpaceId::R: break;
  }
  return "T" + std::to_string(idx);
}

/// Identity of a field symbol: space, family, and index (0 for unindexed families).
struct FieldSymbol {
  SpaceId space = SpaceId::CH;
  std::uint8_t family = 0;
  std::uint8_t index = 0;

  auto operator<=>(const FieldSymbol&) const = default;

  std::string_view name() const { return family_info(space, family).name; }
  bool indexed() const { return family_info(space, family).indexed; }
};

/// An independent variable of a space.
struct Var {
  SpaceId space = SpaceId::CH;
  std::uint8_t index = 0;

  auto operator<=>(const Var&) const = default;
  std::string name() const { return var_name(space, index); }
};

/// One of the three variable spaces, instantiated for a concrete n.
class VarSpace {
 public:
  VarSpace(SpaceId id, int n) : id_(id), n_(n) {
    if (n < 1 || n > kMaxN) throw DomainError("n out of range 1.." + std::to_string(kMaxN));
  }

  static VarSpace ch(int n) { return {SpaceId::CH, n}; }
  static VarSpace qiao(int n) { return {SpaceId::Q, n}; }
  static VarSpace reciprocal(int n) { return {SpaceId::R, n}; }

  SpaceId id() const { return id_; }
  int n() const { return n_; }
  std::string_view name() const { return space_name(id_); }

  int num_vars() const { return id_ == SpaceId::R ? n_ + 1 : 2; }
  Var var(int idx) const {
    if (idx < 0 || idx >= num_vars()) throw DomainError("variable index out of range");
    return Var{id_, static_cast<std::uint8_t>(idx)};
  }

  std::vector<std::string> vars() const {
    std::vector<std::string> out;
    for (int i = 0; i < num_vars(); ++i) out.push_back(var_name(id_, i));
    return out;
  }

  std::optional<Var> find_var(std::string_view name) const {
    for (int i = 0; i < num_vars(); ++i)
      if (var_name(id_, i) == name) return var(i);
    return std::nullopt;
  }

  Var var(std::string_view name) const {
    if (auto v = find_var(name)) return *v;
    throw DomainError("unknown variable " + std::string(name) + " in space " + std::string(this->name()));
  }

  /// Every field declared on this space, indexed families expanded over 1..n.
  std::vector<FieldSymbol> fields() const {
    std::vector<FieldSymbol> out;
    for (std::uint8_t f = 0; f < family_count(id_); ++f) {
      if (family_info(id_, f).indexed) {
        for (int i = 1; i <= n_; ++i) out.push_back({id_, f, static_cast<std::uint8_t>(i)});
      } else {
        out.push_back({id_, f, 0});
      }
    }
    return out;
  }

  std::optional<std::uint8_t> find_family(std::string_view name) const {
    for (std::uint8_t f = 0; f < family_count(id_); ++f)
      if (family_info(id_, f).name == name) return f;
    // accepted spelling for the Qiao potential family
    if (id_ == SpaceId::Q && name == "omega") return family::w;
    return std::nullopt;
  }

  FieldSymbol field(std::uint8_t fam, int index = 0) const {
    const auto& info = family_info(id_, fam);
    if (info.indexed != (index != 0)) throw DomainError("field " + std::string(info.name) + " index mismatch");
    if (info.indexed && (index < 1 || index > n_))
      throw DomainError("index " + std::to_string(index) + " of " + std::string(info.name) + " out of range 1.." +
                        std::to_string(n_));
    return {id_, fam, static_cast<std::uint8_t>(index)};
  }

 private:
  SpaceId id_;
  int n_;
};

}  // namespace mrt
