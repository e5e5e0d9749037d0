#pragma once

// Scalar variable tags on (R^m x C^n)^(k-1) plus the scale variables T_alpha.
//
// Slots are the center-of-mass differences q^alpha, alpha = 1..k-1.
// Coordinates are 1-based: y_i with i <= m, (w_j, wbar_j) with j <= n.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace oneloop {

// Dimension signature (m, n) of R^m x C^n together with the vertex count k.
struct SpaceSignature {
  int m = 0;  // real (de Rham) directions
  int n = 0;  // complex (Dolbeault) directions
  int k = 0;  // wheel vertices / edges

  int slots() const { return k - 1; }
  bool valid() const { return m >= 0 && n >= 0 && k >= 1 && m + n >= 1; }
  friend bool operator==(const SpaceSignature&, const SpaceSignature&) = default;
};

enum class VarKind : std::uint8_t { Y = 0, W = 1, WBar = 2, T = 3 };

struct Var {
  VarKind kind;
  std::uint16_t slot;   // q-slot for Y/W/WBar (1..k-1); index 1..k for T
  std::uint16_t coord;  // 1..m for Y, 1..n for W/WBar; unused (0) for T

  std::uint32_t packed() const {
    return (static_cast<std::uint32_t>(kind) << 24) |
           (static_cast<std::uint32_t>(slot) << 12) | coord;
  }
  friend bool operator==(const Var& a, const Var& b) { return a.packed() == b.packed(); }
  friend auto operator<=>(const Var& a, const Var& b) { return a.packed() <=> b.packed(); }
};

inline Var y_var(int slot, int coord) {
  return Var{VarKind::Y, static_cast<std::uint16_t>(slot), static_cast<std::uint16_t>(coord)};
}
inline Var w_var(int slot, int coord) {
  return Var{VarKind::W, static_cast<std::uint16_t>(slot), static_cast<std::uint16_t>(coord)};
}
inline Var wbar_var(int slot, int coord) {
  return Var{VarKind::WBar, static_cast<std::uint16_t>(slot), static_cast<std::uint16_t>(coord)};
}
inline Var t_var(int index) { return Var{VarKind::T, static_cast<std::uint16_t>(index), 0}; }

inline std::string to_string(const Var& v) {
  switch (v.kind) {
    case VarKind::Y: return "y" + std::to_string(v.slot) + "_" + std::to_string(v.coord);
    case VarKind::W: return "w" + std::to_string(v.slot) + "_" + std::to_string(v.coord);
    case VarKind::WBar: return "wb" + std::to_string(v.slot) + "_" + std::to_string(v.coord);
    case VarKind::T: return "T" + std::to_string(v.slot);
  }
  throw std::logic_error("to_string(Var): bad kind");
}

}  // namespace oneloop
