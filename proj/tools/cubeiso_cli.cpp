// cubeiso: command-line driver for the verification, census, shifting,
// stability and search engines.
//
// Exit codes: 0 success, 1 a proved statement was violated beyond tolerance,
// 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cubeiso/cubeiso.hpp"
#include "cubeiso/report.hpp"

namespace {

using namespace cubeiso;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  std::string csv;
  int threads = default_threads();
};

struct Outcome {
  json report;
  int exit_code = kExitOk;
  std::vector<std::vector<std::string>> csv_rows;  // first row is the header
};

void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, target);
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::vector<std::string>> witness_rows(const std::string& kind, int n, const std::vector<Witness>& ws) {
  std::vector<std::vector<std::string>> rows{{"kind", "n", "index", "A", "B", "margin"}};
  for (std::size_t i = 0; i < ws.size(); ++i)
    rows.push_back({kind, std::to_string(n), std::to_string(i), to_hex(ws[i].A), ws[i].B ? to_hex(*ws[i].B) : "",
                    fmt_double(ws[i].margin)});
  return rows;
}

Partition parse_partition(int n, const std::vector<std::string>& masks) {
  if (masks.size() != 2) throw UsageError("--partition takes two masks: <A> <B>");
  const CubeDim dim(n);
  try {
    return Partition(parse_hex(masks[0], dim), parse_hex(masks[1], dim));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// {"f": [f(0), ..., f(m)], "g_scale": c, "k": k} with g(t) = c 2t(1-t).
FunctionalSpec load_generic_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read functional spec file " + path);
  try {
    const auto j = nlohmann::json::parse(is);
    return FunctionalSpec::scaled_main(j.at("f").get<std::vector<double>>(), j.value("g_scale", 1.0),
                                       j.at("k").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed functional spec file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid functional spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  int n = 0;
  std::string inequality;
  std::optional<double> K;
  std::vector<double> p;
  std::uint64_t trials = 10000;
  std::optional<std::uint64_t> seed;
  int grid_points = 1000;
  std::string generic_f;
  bool large = false;
  std::uint64_t chunk = kDefaultChunk;
};

Outcome cmd_verify(const VerifyArgs& a, const Common& common, RunManifest manifest) {
  ScanOptions opt{common.threads, a.chunk, a.large};
  json params = {{"inequality", a.inequality}};
  ScanReport r;
  try {
    if (a.inequality == "main" || a.inequality == "talagrand" || a.inequality == "generic") {
      std::optional<FunctionalSpec> spec;
      SetInequality which = a.inequality == "main" ? SetInequality::kMain
                            : a.inequality == "talagrand" ? SetInequality::kTalagrand
                                                          : SetInequality::kGeneric;
      if (which == SetInequality::kGeneric) {
        if (a.generic_f.empty()) throw UsageError("--inequality generic needs --generic-f");
        spec = load_generic_spec(a.generic_f);
        params["k"] = spec->k();
        params["f"] = std::vector<double>(spec->f_table().begin(), spec->f_table().end());
      }
      r = exhaustive_verify_sets(a.n, which, opt, spec ? &*spec : nullptr);
    } else if (a.inequality == "corkpi" || a.inequality == "cubesep") {
      PartitionScanParams pp;
      pp.K = a.K;
      if (a.K) params["K"] = *a.K;
      r = exhaustive_verify_partitions(a.n, a.inequality == "corkpi" ? PartitionInequality::kCorKPi
                                                                      : PartitionInequality::kCubeSep,
                                       pp, opt);
    } else if (a.inequality == "harris") {
      std::vector<double> p = a.p.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(a.n, 0)), 0.5) : a.p;
      params["p"] = p;
      r = verify_harris(a.n, p);
    } else if (a.inequality == "plus1") {
      const std::uint64_t seed = resolve_seed(a.seed);
      manifest.seed = seed;
      params["trials"] = a.trials;
      params["seed"] = seed;
      r = verify_plus1_lemma(a.trials, seed);
    } else if (a.inequality == "gpos") {
      params["grid_points"] = a.grid_points;
      r = verify_gpos(a.grid_points, opt);
    } else {
      throw UsageError("unknown inequality '" + a.inequality + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Outcome o;
  // Cube separation with a chosen K is a conjecture, not a proved bound.
  const bool proved = !(a.inequality == "cubesep" && a.K);
  o.exit_code = r.passed() || !proved ? kExitOk : kExitViolation;
  json results = results_json(r);
  results["proved_statement"] = proved;
  o.report = make_report(manifest, "verify", r.n, params, results, witnesses_json(r.witnesses), r.min_margin,
                         r.runtime_ms);
  o.csv_rows = witness_rows(r.inequality, r.n, r.witnesses);
  return o;
}

Outcome cmd_census(int n, const Common& common, const RunManifest& manifest, std::uint64_t chunk) {
  detail::Stopwatch clock;
  std::vector<CensusEntry> census;
  try {
    census = equality_census(n, ScanOptions{common.threads, chunk, false});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json classes = json::array();
  std::vector<Witness> ws;
  bool codim[kMaxDim + 1] = {};
  double min_dev = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::string>> rows{{"n", "label", "size", "set"}};
  for (const auto& e : census) {
    classes.push_back(to_json(e));
    ws.push_back({e.set, std::nullopt, static_cast<double>(e.deficit)});
    if (e.subcube_codim) codim[*e.subcube_codim] = true;
    min_dev = std::min(min_dev, static_cast<double>(e.deficit));
    rows.push_back({std::to_string(n), e.label(), std::to_string(e.set.size()), to_hex(e.set)});
  }
  json results = {{"classes", classes},
                  {"class_count", census.size()},
                  {"contains_codim1", codim[1]},
                  {"contains_codim2", n >= 2 && codim[2]},
                  {"contains_codim3", n >= 3 && codim[3]}};
  Outcome o;
  o.report = make_report(manifest, "census", n, {{"tolerance", kTolerance}}, results, witnesses_json(ws), min_dev,
                         clock.elapsed_ms());
  o.csv_rows = std::move(rows);
  return o;
}

Outcome cmd_shift(int n, const std::vector<std::string>& masks, const RunManifest& manifest) {
  detail::Stopwatch clock;
  const Partition P = parse_partition(n, masks);
  const ShiftTrace t = compress(P);
  const Partition& Q = t.final;
  bool sizes = P.A().size() == Q.A().size() && P.B().size() == Q.B().size();
  bool nonincrease = true;
  for (int c = 0; c < n; ++c)
    nonincrease = nonincrease && directional_cross_size(Q.A(), Q.B(), c) <= directional_cross_size(P.A(), P.B(), c);
  const bool monotone = is_increasing(Q.A()) && is_decreasing(Q.B());
  json results = to_json(t);
  results["guarantees"] = {{"sizes_preserved", sizes}, {"monotone", monotone}, {"cross_nonincreasing", nonincrease}};
  Outcome o;
  o.exit_code = sizes && monotone && nonincrease ? kExitOk : kExitViolation;
  o.report = make_report(manifest, "shift", n, {{"partition", {masks[0], masks[1]}}}, results,
                         json::array({{{"partition", {{"A", to_hex(Q.A())}, {"B", to_hex(Q.B())}}}, {"margin", 0.0}}}),
                         0.0, clock.elapsed_ms());
  o.csv_rows.push_back({"step", "coord", "swaps"});
  for (std::size_t i = 0; i < t.steps.size(); ++i)
    o.csv_rows.push_back({std::to_string(i), std::to_string(t.steps[i].coord + 1), std::to_string(t.steps[i].swaps)});
  return o;
}

struct StabilityArgs {
  int n = 0;
  int k = 1;
  std::vector<std::string> partition;
  double eps_max = 0.01;
  std::string generic_f;
  std::string mode = "subcube";
};

Outcome cmd_stability(const StabilityArgs& a, const RunManifest& manifest) {
  detail::Stopwatch clock;
  if (a.k < 1 || a.k > a.n) throw UsageError("--k must lie in [1, n]");
  const Partition P = parse_partition(a.n, a.partition);
  StabilityOptions opt{a.eps_max};
  json params = {{"k", a.k}, {"eps_max", number(a.eps_max)}, {"mode", a.mode}, {"partition", a.partition}};
  json results;
  double margin = 0.0;
  try {
    StabilityResult r;
    if (!a.generic_f.empty()) {
      const auto spec = load_generic_spec(a.generic_f);
      if (spec.k() != a.k) throw UsageError("functional spec k does not match --k");
      params["generic_f"] = std::vector<double>(spec.f_table().begin(), spec.f_table().end());
      r = stability_generic(P, spec, a.k, opt);
    } else if (a.mode == "directions") {
      r = find_direction_set(P, a.k, opt);
    } else if (a.mode == "subcube") {
      r = recover_subcube(P, a.k, opt);
    } else {
      throw UsageError("--mode must be subcube or directions");
    }
    results = to_json(r);
    results["status"] = "ok";
    margin = r.symdiff;
  } catch (const HypothesisFailure& e) {
    results = {{"status", "hypothesis_failure"}, {"message", e.what()}, {"min_epsilon", number(e.min_epsilon)}};
  } catch (const AmbiguousSubcube& e) {
    results = {{"status", "ambiguous"}, {"message", e.what()}, {"deltas", e.deltas}};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  results["hab_histogram_input"] = json::object();
  for (const auto& [h, mu] : h_ab_histogram(P)) results["hab_histogram_input"][std::to_string(h)] = mu;
  Outcome o;
  o.report = make_report(manifest, "stability", a.n, params, results,
                         json::array({{{"partition", {{"A", to_hex(P.A())}, {"B", to_hex(P.B())}}}, {"margin", margin}}}),
                         margin, clock.elapsed_ms());
  o.csv_rows.push_back({"h_ab", "measure"});
  for (const auto& [h, mu] : h_ab_histogram(P)) o.csv_rows.push_back({std::to_string(h), fmt_double(mu)});
  return o;
}

struct SearchArgs {
  std::string objective;
  int n = 3;
  double K = 1.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t iters = 1'000'000;
  int restarts = 10;
  double t0 = 1.0;
  double decay = 0.999;
  std::optional<std::uint64_t> size;
  bool exhaustive = false;
  bool large = false;
  std::string witness_out;
};

Outcome cmd_search(const SearchArgs& a, const Common& common, RunManifest manifest) {
  Objective obj;
  try {
    obj.kind = parse_objective(a.objective);
    obj.K = a.K;
    obj.exact_size = a.size;
    obj.validate(CubeDim(a.n).n());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json params = {{"objective", a.objective}, {"exhaustive", a.exhaustive}};
  if (obj.kind == ObjectiveKind::kConjFixedK) params["K"] = a.K;
  if (a.size) params["size"] = *a.size;

  Outcome o;
  double best = 0.0;
  std::optional<Partition> best_partition;
  bool negative_verified = false;
  json results;
  double runtime = 0.0;
  std::uint64_t seed = 0;
  if (a.exhaustive) {
    ScanReport r;
    try {
      r = exhaustive_minimum(obj, a.n, ScanOptions{common.threads, kDefaultChunk, a.large});
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    results = results_json(r);
    if (obj.kind == ObjectiveKind::kConjFixedK) {
      const auto fk = min_feasible_K(a.n, ScanOptions{common.threads, kDefaultChunk, a.large});
      results["min_feasible_K"] = fk.K;
      results["min_feasible_K_witness"] = fk.witness ? to_json(*fk.witness) : json(nullptr);
    }
    best = r.min_margin;
    if (!r.witnesses.empty()) best_partition = Partition(r.witnesses.front().A, *r.witnesses.front().B);
    negative_verified = best_partition && best < -kTolerance && evaluate_ld(obj, *best_partition) < -static_cast<long double>(kTolerance);
    runtime = r.runtime_ms;
    o.csv_rows = witness_rows(r.inequality, a.n, r.witnesses);
    o.report = make_report(manifest, "search", a.n, params, results, witnesses_json(r.witnesses), best, runtime);
  } else {
    seed = resolve_seed(a.seed);
    manifest.seed = seed;
    params["seed"] = seed;
    params["iterations"] = a.iters;
    params["restarts"] = a.restarts;
    params["t0"] = a.t0;
    params["decay"] = a.decay;
    SearchConfig cfg;
    cfg.n = a.n;
    cfg.seed = seed;
    cfg.iterations = a.iters;
    cfg.restarts = a.restarts;
    cfg.t0 = a.t0;
    cfg.decay = a.decay;
    cfg.threads = common.threads;
    detail::Stopwatch clock;
    AnnealResult r;
    try {
      r = anneal(obj, cfg);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    runtime = clock.elapsed_ms();
    best = r.best_value;
    best_partition = r.best;
    negative_verified = r.negative_verified;
    results = to_json(r);
    o.csv_rows.push_back({"restart", "iteration", "best"});
    for (const auto& t : r.trace)
      o.csv_rows.push_back({std::to_string(t.restart), std::to_string(t.iteration), fmt_double(t.best)});
    json ws = json::array({{{"partition", {{"A", to_hex(r.best->A())}, {"B", to_hex(r.best->B())}}},
                            {"margin", number(r.best_value)}}});
    o.report = make_report(manifest, "search", a.n, params, results, ws, best, runtime);
  }

  o.report["results"]["potential_counterexample"] = negative_verified && !obj.proved();
  o.report["results"]["proved_statement"] = obj.proved();
  if (negative_verified) {
    if (obj.proved()) {
      o.exit_code = kExitViolation;
    } else {
      json w = {{"objective", a.objective},
                {"n", a.n},
                {"partition", {{"A", to_hex(best_partition->A())}, {"B", to_hex(best_partition->B())}}},
                {"margin", best},
                {"seed", a.exhaustive ? json(nullptr) : json(seed)},
                {"iteration", a.exhaustive ? json(nullptr) : o.report["results"]["best_iteration"]}};
      if (obj.kind == ObjectiveKind::kConjFixedK) w["K"] = a.K;
      const std::string path = !a.witness_out.empty()
                                   ? a.witness_out
                                   : "witness-" + a.objective + "-n" + std::to_string(a.n) +
                                         (a.exhaustive ? std::string("-exhaustive") : "-seed" + std::to_string(seed)) +
                                         ".json";
      write_atomically(path, w.dump(2) + "\n");
      o.report["results"]["witness_file"] = path;
      std::cerr << "potential counterexample: margin " << best << " written to " << path << "\n";
    }
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubeiso: isoperimetric verification, census, shifting, stability and search on Q_n"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: ISO_THREADS or hardware)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Write the JSON report here instead of stdout");
  app.add_option("--csv", common.csv, "Also write a flat CSV projection here");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Exhaustive or sampled verification of an inequality");
  verify->add_option("--n", va.n, "Cube dimension");
  verify->add_option("--inequality", va.inequality, "main|talagrand|generic|corkpi|cubesep|harris|plus1|gpos")
      ->required()
      ->check(CLI::IsMember({"main", "talagrand", "generic", "corkpi", "cubesep", "harris", "plus1", "gpos"}));
  verify->add_option("--K", va.K, "cubesep: use K sqrt(n) in place of n^beta");
  verify->add_option("--p", va.p, "harris: per-coordinate biases (default 1/2)");
  verify->add_option("--trials", va.trials, "plus1: random instances");
  verify->add_option("--seed", va.seed, "plus1: seed (generated and recorded when absent)");
  verify->add_option("--grid-points", va.grid_points, "gpos: grid points per axis");
  verify->add_option("--generic-f", va.generic_f, "generic: JSON file {f: [...], g_scale, k}");
  verify->add_option("--chunk", va.chunk, "Scan chunk size")->check(CLI::PositiveNumber);
  verify->add_flag("--flag-large-n", va.large, "Allow n = 5 set scans and n = 4 partition scans");

  int census_n = 0;
  std::uint64_t census_chunk = kDefaultChunk;
  auto* census = app.add_subcommand("census", "Equality classes of the beta-power inequality");
  census->add_option("--n", census_n, "Cube dimension (<= 4)")->required();
  census->add_option("--chunk", census_chunk, "Scan chunk size")->check(CLI::PositiveNumber);

  int shift_n = 0;
  std::vector<std::string> shift_partition;
  auto* shift = app.add_subcommand("shift", "Compress a partition to a monotone one");
  shift->add_option("--n", shift_n, "Cube dimension")->required();
  shift->add_option("--partition", shift_partition, "<A> <B> hex masks")->required()->expected(2);

  StabilityArgs sa;
  auto* stability = app.add_subcommand("stability", "Direction set and subcube recovery");
  stability->add_option("--n", sa.n, "Cube dimension")->required();
  stability->add_option("--k", sa.k, "Codimension")->required();
  stability->add_option("--partition", sa.partition, "<A> <B> hex masks")->required()->expected(2);
  stability->add_option("--eps-max", sa.eps_max, "Largest accepted eps (inf disables the check)");
  stability->add_option("--generic-f", sa.generic_f, "JSON file {f: [...], g_scale, k}");
  stability->add_option("--mode", sa.mode, "subcube|directions");

  SearchArgs sea;
  auto* search = app.add_subcommand("search", "Minimise a margin by annealing or exhaustive scan");
  search->add_option("--objective", sea.objective, "conj-fixedK|conj-maximal|cubesep|main-deficit")
      ->required()
      ->check(CLI::IsMember({"conj-fixedK", "conj-maximal", "cubesep", "main-deficit"}));
  search->add_option("--n", sea.n, "Cube dimension")->required();
  search->add_option("--K", sea.K, "conj-fixedK constant");
  search->add_option("--seed", sea.seed, "Seed (generated and recorded when absent)");
  search->add_option("--iters", sea.iters, "Iterations per restart")->check(CLI::PositiveNumber);
  search->add_option("--restarts", sea.restarts, "Independent restarts")->check(CLI::PositiveNumber);
  search->add_option("--t0", sea.t0, "Initial temperature");
  search->add_option("--decay", sea.decay, "Geometric temperature decay per iteration");
  search->add_option("--size", sea.size, "Require |A| = size");
  search->add_flag("--exhaustive", sea.exhaustive, "Scan every partition instead of annealing");
  search->add_flag("--flag-large-n", sea.large, "Allow the n = 4 exhaustive scan");
  search->add_option("--witness-out", sea.witness_out, "Witness file path for potential counterexamples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  RunManifest manifest;
  for (const auto* opt : app.get_options())
    if (opt->count()) manifest.flags[opt->get_name()] = opt->as<std::string>();
  for (auto* sub : app.get_subcommands()) {
    manifest.subcommand = sub->get_name();
    for (const auto* opt : sub->get_options())
      if (opt->count() && !opt->get_name().empty()) {
        std::string joined;
        for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
        manifest.flags[opt->get_name()] = joined;
      }
  }

  try {
    Outcome o;
    if (verify->parsed()) {
      o = cmd_verify(va, common, manifest);
    } else if (census->parsed()) {
      o = cmd_census(census_n, common, manifest, census_chunk);
    } else if (shift->parsed()) {
      manifest.inputs["partition"] = shift_partition.at(0) + " " + shift_partition.at(1);
      o = cmd_shift(shift_n, shift_partition, manifest);
    } else if (stability->parsed()) {
      manifest.inputs["partition"] = sa.partition.at(0) + " " + sa.partition.at(1);
      o = cmd_stability(sa, manifest);
    } else if (search->parsed()) {
      o = cmd_search(sea, common, manifest);
    }
    const std::string text = o.report.dump(2) + "\n";
    if (common.out.empty()) std::cout << text;
    else write_atomically(common.out, text);
    if (!common.csv.empty()) write_atomically(common.csv, csv_text(o.csv_rows));
    return o.exit_code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
