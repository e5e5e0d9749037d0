#pragma once

// Named theory presets: fixed (m, n) pairs for the standard examples plus the
// free BF family, where the dimension split stays caller-chosen.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oneloop::presets {

struct Preset {
  std::string_view name;
  int m = 0;
  int n = 0;
  bool fixed = true;  // false: (m, n) must come from the config
  std::string_view description;
};

inline constexpr std::array<Preset, 5> all{{
    {"cs4d", 2, 1, true, "Chern-Simons type theory on R^2 x C"},
    {"cs5d", 1, 2, true, "Chern-Simons type theory on R x C^2"},
    {"bf", 0, 0, false, "BF type theory, dimension split chosen per run"},
    {"kapustin", 2, 1, true, "Kapustin twist on R^2 x C"},
    {"bf2d-holomorphic", 0, 1, true, "holomorphic theory on C"},
}};

inline std::optional<Preset> find(std::string_view name) {
  for (const auto& p : all)
    if (p.name == name) return p;
  return std::nullopt;
}

// Final (m, n) for a run: fixed presets reject conflicting explicit values,
// the free preset requires them.
inline std::pair<int, int> resolve(const Preset& p, std::optional<int> m, std::optional<int> n) {
  if (p.fixed) {
    if ((m && *m != p.m) || (n && *n != p.n))
      throw std::invalid_argument(std::string("preset ") + std::string(p.name) +
                                  " fixes (m, n); explicit values conflict");
    return {p.m, p.n};
  }
  if (!m || !n)
    throw std::invalid_argument(std::string("preset ") + std::string(p.name) +
                                " needs explicit m and n");
  return {*m, *n};
}

}  // namespace oneloop::presets
