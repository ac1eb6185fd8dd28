#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>

#include "mrt/space.hpp"

namespace mrt {

/// A field together with a multi-index of derivative orders, one entry per
/// variable of the field's space.
///
/// The defaulted ordering is the canonical jet order: space, field priority,
/// field index, then the multi-index lexicographically in declared variable order.
struct Jet {
  FieldSymbol field;
  std::array<std::uint8_t, kMaxVars> d{};

  Jet() = default;
  explicit Jet(FieldSymbol f) : field(f) {}
  Jet(FieldSymbol f, std::initializer_list<std::pair<int, int>> orders) : field(f) {
    for (auto [v, k] : orders) d.at(static_cast<std::size_t>(v)) += static_cast<std::uint8_t>(k);
  }

  auto operator<=>(const Jet&) const = default;

  SpaceId space() const { return field.space; }

  int order(int v) const { return d[static_cast<std::size_t>(v)]; }

  int total_order() const {
    int s = 0;
    for (auto k : d) s += k;
    return s;
  }

  Jet derivative(int v, int times = 1) const {
    Jet j = *this;
    int k = j.d.at(static_cast<std::size_t>(v)) + times;
    if (k > 255) throw DomainError("derivative order overflow");
    j.d[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(k);
    return j;
  }

  Jet base() const { return Jet(field); }

  /// True when `other` is a (possibly trivial) derivative of this jet.
  bool divides(const Jet& other) const {
    if (field != other.field) return false;
    for (int v = 0; v < kMaxVars; ++v)
      if (d[v] > other.d[v]) return false;
    return true;
  }
};

struct JetHash {
  std::size_t operator()(const Jet& j) const noexcept {
    std::size_t h = (static_cast<std::size_t>(j.field.space) << 16) ^ (static_cast<std::size_t>(j.field.family) << 8) ^
                    j.field.index;
    for (auto k : j.d) h = h * 1099511628211ULL ^ k;
    return h;
  }
};

/// Plain-text spelling: `Omega[1]_{X,X,X}`, `X_{T0,T1}`, `u`.
inline std::string jet_text(const Jet& j) {
  std::string s(j.field.name());
  if (j.field.indexed()) s += "[" + std::to_string(j.field.index) + "]";
  if (j.total_order() > 0) {
    s += "_{";
    bool first = true;
    for (int v = 0; v < kMaxVars; ++v) {
      for (int k = 0; k < j.d[v]; ++k) {
        if (!first) s += ",";
        s += var_name(j.space(), v);
        first = false;
      }
    }
    s += "}";
  }
  return s;
}

/// LaTeX spelling: `\Omega^{(1)}_{XXX}`; reciprocal-space derivatives use the
/// bare variable indices, `X_{001}`, comma separated when an index exceeds 9.
inline std::string jet_latex(const Jet& j) {
  std::string s(family_info(j.space(), j.field.family).latex);
  if (j.field.indexed()) s += "^{(" + std::to_string(j.field.index) + ")}";
  if (j.total_order() > 0) {
    bool wide = false;
    if (j.space() == SpaceId::R)
      for (int v = 10; v < kMaxVars; ++v) wide = wide || j.d[v] > 0;
    s += "_{";
    bool first = true;
    for (int v = 0; v < kMaxVars; ++v) {
      for (int k = 0; k < j.d[v]; ++k) {
        if (wide && !first) s += ",";
        s += j.space() == SpaceId::R ? std::to_string(v) : var_name(j.space(), v);
        first = false;
      }
    }
    s += "}";
  }
  return s;
}

}  // namespace mrt
