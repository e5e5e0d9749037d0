#pragma once

// Machine-readable run reports: canonical JSON with an embedded config hash,
// raw ladder data sufficient to re-derive every verdict offline, and an
// RFC 4180 CSV emitter for the ladder points.  No timestamps anywhere, so a
// fixed config and seed reproduce the bytes.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oneloop/extrapolate.hpp"
#include "oneloop/loop_integral.hpp"
#include "oneloop/quadrature.hpp"

namespace oneloop::report {

using json = nlohmann::ordered_json;

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

// Hash of the canonicalized config (insertion-ordered dump), stable across
// runs with the same parsed content.
inline std::string config_hash(const json& config) { return hex64(fnv1a(config.dump())); }

inline const char* verdict_name(LadderVerdict v) {
  return v == LadderVerdict::Converged ? "Converged" : "Inconclusive";
}

inline json to_json(const quadrature::QuadResult& r) {
  return json{{"value", r.value},
              {"error", r.error},
              {"converged", r.converged},
              {"evaluations", r.evals}};
}

inline json ladder_json(const std::vector<LadderPoint>& ladder) {
  json rungs = json::array();
  for (const auto& pt : ladder) rungs.push_back(json{{"epsilon", pt.epsilon}, {"value", pt.value}});
  return rungs;
}

inline json to_json(const engine::ConvergenceReport& r) {
  return json{{"ladder", ladder_json(r.ladder)},
              {"extrapolated", r.extrapolated},
              {"error", r.error},
              {"verdict", verdict_name(r.verdict)},
              {"quadrature_ok", r.quadrature_ok},
              {"quadrature_error", r.quadrature_error}};
}

inline json to_json(const ExtrapolationResult& r) {
  return json{{"ladder", ladder_json(r.rungs)},
              {"extrapolated", r.extrapolated},
              {"ratio", r.ratio},
              {"tail", r.tail},
              {"verdict", verdict_name(r.verdict)}};
}

// Re-runs the extrapolation on raw ladder points embedded in a report, so a
// stored report's verdict can be audited without recomputing integrals.
inline ExtrapolationResult rederive(const json& ladder, double rel_tol) {
  std::vector<LadderPoint> pts;
  for (const auto& row : ladder)
    pts.push_back(LadderPoint{row.at("epsilon").get<double>(), row.at("value").get<double>()});
  return extrapolate_ladder(pts, rel_tol);
}

// RFC 4180: quote fields containing comma, quote, or newline; double embedded
// quotes; records end with CRLF.
inline std::string csv_field(std::string_view raw) {
  const bool needs_quotes = raw.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(raw);
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

inline std::string format_double(double v) {
  json j = v;
  return j.dump();
}

inline void write_ladder_csv(std::ostream& os, const std::vector<LadderPoint>& ladder) {
  write_csv_row(os, {"rung", "epsilon", "value"});
  for (std::size_t i = 0; i < ladder.size(); ++i)
    write_csv_row(os, {std::to_string(i + 1), format_double(ladder[i].epsilon),
                       format_double(ladder[i].value)});
}

}  // namespace oneloop::report
