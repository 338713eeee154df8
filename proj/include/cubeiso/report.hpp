#pragma once

// JSON serialization of results.
//
// Every report has the envelope
//   {schema, manifest, kind, n, params, results, witnesses[], min_margin, runtime_ms}
// and all vertex sets are written in the "n=<dim>:<hex>" mask format.
// Coordinates are printed 1-based.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeiso/cube.hpp"
#include "cubeiso/search.hpp"
#include "cubeiso/shifting.hpp"
#include "cubeiso/stability.hpp"
#include "cubeiso/verification.hpp"

namespace cubeiso {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "cube-iso/1";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Non-finite doubles are written as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> inputs;  // name -> raw input; hashed on output
  std::string started = utc_timestamp();
  std::string finished;

  json to_json() const {
    json j;
    j["tool_version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    json hashes = json::object();
    for (const auto& [k, v] : inputs) hashes[k] = hex64(fnv1a64(v));
    j["input_hashes"] = hashes;
    j["started"] = started;
    j["finished"] = finished.empty() ? utc_timestamp() : finished;
    return j;
  }
};

inline json coords_json(const std::vector<int>& cs) {
  json a = json::array();
  for (int c : cs) a.push_back(c + 1);
  return a;
}

inline json to_json(const Subcube& C) {
  json I = json::array(), z = json::array();
  for (int c : C.coords()) {
    I.push_back(c + 1);
    z.push_back((C.z >> c) & 1u);
  }
  return {{"I", I}, {"z", z}};
}

inline json to_json(const Partition& P) {
  return {{"A", to_hex(P.A())}, {"B", to_hex(P.B())}, {"W", to_hex(P.W())}};
}

inline json to_json(const Witness& w) {
  json j;
  if (w.B) {
    j["partition"] = {{"A", to_hex(w.A)}, {"B", to_hex(*w.B)}};
  } else {
    j["set"] = to_hex(w.A);
  }
  j["margin"] = number(w.margin);
  return j;
}

inline json witnesses_json(const std::vector<Witness>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back(to_json(w));
  return a;
}

inline json results_json(const ScanReport& r) {
  json j;
  j["inequality"] = r.inequality;
  j["scanned"] = r.scanned;
  j["violations"] = r.violations;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed();
  json stats = json::object();
  for (const auto& [k, v] : r.stats) stats[k] = number(v);
  j["stats"] = stats;
  return j;
}

inline json to_json(const CensusEntry& e) {
  std::ostringstream os;
  os << std::setprecision(21) << e.deficit;
  return {{"set", to_hex(e.set)}, {"label", e.label()}, {"size", e.set.size()}, {"deficit_ld", os.str()}};
}

inline json to_json(const ShiftTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back({{"coord", s.coord + 1}, {"swaps", s.swaps}});
  return {{"initial", to_json(t.initial)},
          {"final", to_json(t.final)},
          {"steps", steps},
          {"nontrivial_steps", t.nontrivial_steps()},
          {"potential_initial", shift_potential(t.initial)},
          {"potential_final", shift_potential(t.final)},
          {"final_A_increasing", is_increasing(t.final.A())},
          {"final_B_decreasing", is_decreasing(t.final.B())}};
}

inline json to_json(const HypothesisMargins& m) {
  return {{"eps", number(m.eps)},
          {"measure", number(m.measure)},
          {"w", number(m.w)},
          {"nabla", number(m.nabla)},
          {"w_conjectural", number(m.w_conjectural)}};
}

inline json to_json(const StabilityResult& r) {
  json per_i = json::array();
  for (const auto& d : r.per_i)
    per_i.push_back({{"coord", d.coord + 1},
                     {"boundary", d.boundary},
                     {"defect", number(d.defect)},
                     {"cross_input", d.cross_input},
                     {"cross_compressed", d.cross_compressed}});
  json hist = json::object();
  for (const auto& [h, mu] : r.hab_histogram) hist[std::to_string(h)] = mu;
  json j;
  j["k"] = r.k;
  j["I"] = coords_json(r.I);
  j["per_i_defect"] = per_i;
  j["cube"] = r.cube ? to_json(*r.cube) : json(nullptr);
  j["deltas"] = r.deltas;
  j["symdiff"] = number(r.symdiff);
  j["min_epsilon"] = number(r.min_epsilon);
  j["hypothesis_margins"] = to_json(r.margins);
  j["hab_histogram"] = hist;
  j["exception_mass"] = number(r.exception_mass);
  j["cross_ratio"] = number(r.cross_ratio);
  j["selected_measure"] = number(r.selected_measure);
  j["compress_steps"] = r.compress_steps;
  return j;
}

inline json to_json(const AnnealResult& r) {
  json chains = json::array();
  for (const auto& c : r.chains)
    chains.push_back({{"restart", c.restart},
                      {"seed", c.seed},
                      {"start_value", number(c.start_value)},
                      {"best_value", number(c.best_value)},
                      {"best_iteration", c.best_iteration},
                      {"accepted", c.accepted}});
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({t.restart, t.iteration, number(t.best)});
  std::ostringstream ld;
  ld << std::setprecision(21) << r.best_value_ld;
  return {{"best_value", number(r.best_value)},
          {"best_value_ld", ld.str()},
          {"best", r.best ? to_json(*r.best) : json(nullptr)},
          {"best_restart", r.best_restart},
          {"best_iteration", r.best_iteration},
          {"chains", chains},
          {"trace", trace},
          {"negative_verified", r.negative_verified}};
}

inline json make_report(const RunManifest& manifest, std::string_view kind, int n, json params, json results,
                        json witnesses, double min_margin, double runtime_ms) {
  json j;
  j["schema"] = kSchema;
  j["manifest"] = manifest.to_json();
  j["kind"] = kind;
  j["n"] = n;
  j["params"] = std::move(params);
  j["results"] = std::move(results);
  j["witnesses"] = std::move(witnesses);
  j["min_margin"] = number(min_margin);
  j["runtime_ms"] = runtime_ms;
  return j;
}

// The report without the fields that legitimately vary between runs.
inline json payload(json report) {
  report.erase("manifest");
  report.erase("runtime_ms");
  return report;
}

}  // namespace cubeiso
