#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "satsched/formulations.hpp"
#include "satsched/generator.hpp"
#include "satsched/instance.hpp"
#include "satsched/linear_model.hpp"
#include "satsched/schedule.hpp"
#include "satsched/solver.hpp"
#include "satsched/validator.hpp"
#include "satsched/windowing.hpp"

namespace satsched::cli {

using nlohmann::ordered_json;

namespace {

constexpr const char* kPreprocessSchema = "satsched.preprocess/1";
constexpr const char* kBuildSchema = "satsched.build/1";
constexpr const char* kSolveSchema = "satsched.solve/1";
constexpr const char* kValidationSchema = "satsched.validation/1";
constexpr const char* kManifestSchema = "satsched.manifest/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_all(const std::string& path, std::istream& in) {
  std::ostringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  ss << f.rdbuf();
  return ss.str();
}

void write_to(const std::string& path, std::string_view text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

/// Everything that shapes a command's output. The digest leaves out paths
/// and wall time so piped and file-based runs cite the same value.
struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> input_digests;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> config;

  void add_input(const std::string& path, std::string_view bytes) {
    inputs.push_back(path);
    input_digests.push_back(fnv1a_hex(bytes));
  }

  std::string digest() const {
    std::string canon = "command " + command + "\n";
    for (const auto& d : input_digests) canon += "input " + d + "\n";
    if (seed) canon += "seed " + std::to_string(*seed) + "\n";
    for (const auto& [k, v] : config) canon += k + "=" + v + "\n";
    canon += "version " + std::string(kToolVersion) + "\n";
    return fnv1a_hex(canon);
  }

  ordered_json to_json(double wall_time) const {
    ordered_json doc;
    doc["schema"] = kManifestSchema;
    doc["command"] = command;
    doc["inputs"] = inputs;
    doc["input_digests"] = input_digests;
    doc["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    doc["config"] = cfg;
    doc["config_digest"] = digest();
    doc["tool_version"] = kToolVersion;
    doc["wall_time"] = wall_time;
    return doc;
  }
};

std::string bool_text(bool b) { return b ? "true" : "false"; }

/// "24h", "90m", "3600s" or plain seconds.
Seconds parse_duration(const std::string& text) {
  if (text.empty()) throw UsageError("empty duration");
  double scale = 1.0;
  std::string digits = text;
  switch (text.back()) {
    case 'h':
      scale = 3600.0;
      digits.pop_back();
      break;
    case 'm':
      scale = 60.0;
      digits.pop_back();
      break;
    case 's':
      digits.pop_back();
      break;
    default:
      break;
  }
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != digits.size() || !(value > 0.0) || !std::isfinite(value)) {
    throw UsageError("bad duration '" + text + "'");
  }
  return value * scale;
}

int threads_from_env() {
  const char* env = std::getenv("SATSCHED_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw UsageError("SATSCHED_THREADS must be a non-negative integer");
  return static_cast<int>(v);
}

std::string default_name(const std::string& path) {
  if (path == "-") return "stdin";
  return std::filesystem::path(path).stem().string();
}

// ---------------------------------------------------------------------------
// Input documents: a plain instance or a preprocess document wrapping one.

struct Loaded {
  SchedulingInstance raw;
  SchedulingInstance normalized;
  PreprocessResult prep;
  PreprocessOptions options;
  bool from_preprocess = false;
};

PreprocessResult run_preprocess(const SchedulingInstance& normalized,
                                const PreprocessOptions& options) {
  if (!options.preassign && !options.subintervals) return PreprocessResult::identity(normalized);
  return preprocess(normalized, options);
}

/// Preprocess documents are recomputed from their source instance and
/// options, then checked against the stored summary.
Loaded load_input(std::string_view text, const PreprocessOptions& options) {
  Loaded out;
  out.options = options;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (doc.is_object() && doc.value("schema", "") == kPreprocessSchema) {
    out.from_preprocess = true;
    out.raw = parse_instance(doc.at("source_instance").dump());
    const auto& opt = doc.at("options");
    out.options.preassign = opt.at("preassign").get<bool>();
    out.options.subintervals = opt.at("subintervals").get<bool>();
  } else {
    out.raw = parse_instance(text);
  }
  out.normalized = normalize_and_clip(out.raw);
  out.prep = run_preprocess(out.normalized, out.options);
  if (out.from_preprocess &&
      (doc.at("n_prime").get<std::size_t>() != out.prep.n_prime() ||
       doc.at("subintervals").size() != out.prep.subintervals.size())) {
    throw std::runtime_error("preprocess document does not match its source instance");
  }
  return out;
}

ordered_json preprocess_json(const Loaded& in, const std::string& digest) {
  const auto& inst = in.normalized;
  const auto& red = in.prep.reduced;
  const Seconds shift = inst.time_shift();
  ordered_json doc;
  doc["schema"] = kPreprocessSchema;
  doc["manifest_digest"] = digest;
  doc["options"] = {{"preassign", in.options.preassign}, {"subintervals", in.options.subintervals}};
  doc["time_shift"] = shift;
  doc["n"] = inst.mission_count();
  doc["n_prime"] = in.prep.n_prime();
  doc["preassigned"] = ordered_json::array();
  for (const auto& p : in.prep.preassigned) {
    const auto& w = inst.windows()[p.window];
    doc["preassigned"].push_back({{"mission", inst.missions()[p.mission].id},
                                  {"resource", inst.resources()[p.resource].id},
                                  {"window", p.window},
                                  {"window_begin", w.begin + shift},
                                  {"window_end", w.end + shift},
                                  {"start", p.start + shift}});
  }
  doc["subintervals"] = ordered_json::array();
  for (const auto& s : in.prep.subintervals) {
    ordered_json candidates = ordered_json::array();
    for (auto c : s.candidates) candidates.push_back(c);
    doc["subintervals"].push_back({{"resource", red.resources()[s.resource].id},
                                   {"begin", s.begin + shift},
                                   {"end", s.end + shift},
                                   {"capacity", s.capacity},
                                   {"candidate_missions", s.candidate_missions(red)},
                                   {"candidates", candidates}});
  }
  doc["source_instance"] = ordered_json::parse(serialize_instance(in.raw));
  doc["reduced_instance"] = ordered_json::parse(serialize_instance(red));
  return doc;
}

// ---------------------------------------------------------------------------

std::string stats_csv(const std::string& name, const SchedulingInstance& inst,
                      const InstanceStats& stats) {
  std::string out = "instance,resource,delta,N,T,F,rn,conf\n";
  for (const auto& r : stats.per_resource) {
    const auto& res = inst.resources()[r.resource];
    out += name + "," + res.id + "," + format_number(res.stabilize) + "," +
           std::to_string(r.window_count) + "," + format_number(r.total_visible) + "," +
           format_number(r.feasible_time) + "," + std::to_string(r.capacity) + "," +
           (r.contention ? format_number(*r.contention) : std::string()) + "\n";
  }
  return out;
}

std::string summary_csv(const std::string& name, const InstanceStats& stats,
                        std::size_t n_prime) {
  return "instance,paon,paot,n_prime\n" + name + "," + format_number(stats.paon) + "," +
         format_number(stats.paot) + "," + std::to_string(n_prime) + "\n";
}

ordered_json schedule_json(const SchedulingInstance& inst, const Schedule& schedule) {
  ordered_json rows = ordered_json::array();
  for (const auto& a : schedule.assignments) {
    rows.push_back({{"mission", inst.missions()[a.mission].id},
                    {"resource", inst.resources()[a.resource].id},
                    {"window_begin", a.window_begin},
                    {"window_end", a.window_end},
                    {"start", a.start},
                    {"duration", inst.missions()[a.mission].duration}});
  }
  return rows;
}

ordered_json nullable(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

// Table-4/5 shaped merge of solve reports.
std::string report_csv(const std::vector<nlohmann::json>& reports) {
  std::string out =
      "instance,objective,method,root_bound,final_bound,best,gap,runtime,proven_optimal,nodes\n";
  for (const auto& r : reports) {
    if (r.value("schema", "") != kSolveSchema) {
      throw std::runtime_error("report input is not a solve report");
    }
    const double best = r.at("best_objective").get<double>();
    const double final_bound = r.at("final_bound").get<double>();
    auto num = [](const nlohmann::json& v) {
      return v.is_null() ? std::string() : format_number(v.get<double>());
    };
    out += r.at("instance").get<std::string>() + "," + r.at("objective").get<std::string>() +
           "," + r.at("method").get<std::string>() + "," + num(r.at("root_bound")) + "," +
           format_number(final_bound) + "," + format_number(best) + "," +
           format_number(relative_gap(final_bound, best)) + "," + num(r.at("runtime")) + "," +
           bool_text(r.at("proven_optimal").get<bool>()) + "," +
           std::to_string(r.at("nodes").get<std::size_t>()) + "\n";
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Observation scheduling toolkit", "satsched"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string output = "-";
  std::string manifest_path;
  std::string input = "-";
  std::string objective_text = "weight";
  std::string name;
  bool no_preassign = false;
  bool no_subintervals = false;
  auto common = [&](CLI::App* sub, bool takes_input) {
    sub->add_option("-o,--output", output, "Output file (default stdout)");
    sub->add_option("--manifest", manifest_path, "Write the run manifest here");
    if (takes_input) {
      sub->add_option("input", input, "Instance or preprocess document ('-' for stdin)");
    }
  };
  auto prep_flags = [&](CLI::App* sub) {
    sub->add_flag("--no-preassign", no_preassign, "Skip free-window and direct assignment");
    sub->add_flag("--no-subintervals", no_subintervals, "Skip subinterval inequalities");
  };

  auto* gen = app.add_subcommand("generate", "Synthetic instance");
  std::string style_text = "R";
  std::size_t missions = 100;
  std::size_t resources = 3;
  std::string horizon_text = "24h";
  std::uint64_t seed = 1;
  common(gen, false);
  gen->add_option("--style", style_text)->check(CLI::IsMember({"R", "C", "M"}));
  gen->add_option("--missions", missions)->check(CLI::PositiveNumber);
  gen->add_option("--resources", resources)->check(CLI::PositiveNumber);
  gen->add_option("--horizon", horizon_text, "24h, 48h or seconds");
  gen->add_option("--seed", seed);

  auto* pre = app.add_subcommand("preprocess", "Pre-assignment and subinterval table");
  common(pre, true);
  prep_flags(pre);

  auto* sta = app.add_subcommand("stats", "Per-resource and per-instance statistics CSVs");
  std::string summary_path;
  common(sta, true);
  sta->add_option("--name", name, "Instance column value");
  sta->add_option("--summary", summary_path,
                  "Second CSV (paon, paot, n_prime); appended after a blank line by default");

  auto* bld = app.add_subcommand("build", "Export a formulation as LP or MPS");
  std::string formulation_text = "improved";
  std::string format_text = "lp";
  std::string sidecar_path;
  std::string name_map_path;
  common(bld, true);
  prep_flags(bld);
  bld->add_option("--formulation", formulation_text)->check(CLI::IsMember({"baseline", "improved"}));
  bld->add_option("--objective", objective_text)->check(CLI::IsMember({"count", "weight"}));
  bld->add_option("--format", format_text)->check(CLI::IsMember({"lp", "mps"}));
  bld->add_option("--sidecar", sidecar_path, "Stats JSON (default <output>.json)");
  bld->add_option("--name-map", name_map_path, "MPS rename CSV (default <output>.names.csv)");

  auto* sol = app.add_subcommand("solve", "Exact combinatorial solve");
  double time_limit = std::numeric_limits<double>::infinity();
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  bool oracle = false;
  bool independent = false;
  std::optional<int> threads_opt;
  std::optional<std::uint64_t> solve_seed;
  std::string schedule_path;
  common(sol, true);
  prep_flags(sol);
  sol->add_option("--objective", objective_text)->check(CLI::IsMember({"count", "weight"}));
  sol->add_option("--time-limit", time_limit, "Seconds")->check(CLI::NonNegativeNumber);
  sol->add_option("--node-limit", node_limit);
  sol->add_flag("--oracle", oracle, "Exhaustive enumeration instead of branch and bound");
  sol->add_flag("--formulation-independent", independent,
                "Accepted for clarity; the solver never reads an LP");
  sol->add_option("--threads", threads_opt, "Default SATSCHED_THREADS, then OpenMP's choice");
  sol->add_option("--seed", solve_seed, "Recorded only; the search is deterministic");
  sol->add_option("--schedule", schedule_path, "Schedule CSV output");
  sol->add_option("--name", name, "Instance label in the report");

  auto* val = app.add_subcommand("validate", "Check a schedule CSV against an instance");
  std::string schedule_in;
  common(val, false);
  val->add_option("instance", input, "Instance or preprocess document")->required();
  val->add_option("schedule", schedule_in, "Schedule CSV ('-' for stdin)")->required();

  auto* rep = app.add_subcommand("report", "Merge solve reports into one CSV");
  std::vector<std::string> report_inputs;
  common(rep, false);
  rep->add_option("reports", report_inputs, "Solve report JSON files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  Manifest manifest;
  PreprocessOptions prep_options{!no_preassign, !no_subintervals};
  auto prep_config = [&] {
    manifest.config.emplace_back("preassign", bool_text(prep_options.preassign));
    manifest.config.emplace_back("subintervals", bool_text(prep_options.subintervals));
  };
  int status = 0;
  try {
    if (gen->parsed()) {
      manifest.command = "generate";
      GenSpec spec;
      spec.style = *parse_style(style_text);
      spec.mission_count = missions;
      spec.resource_count = resources;
      spec.horizon = parse_duration(horizon_text);
      spec.seed = seed;
      manifest.seed = seed;
      manifest.config = {{"style", style_text},
                         {"missions", std::to_string(missions)},
                         {"resources", std::to_string(resources)},
                         {"horizon", format_number(spec.horizon)}};
      auto doc = ordered_json::parse(serialize_instance(generate(spec)));
      ordered_json tagged;
      tagged["schema"] = doc["schema"];
      tagged["manifest_digest"] = manifest.digest();
      for (auto& [k, v] : doc.items()) {
        if (k != "schema") tagged[k] = v;
      }
      write_to(output, dump(tagged), out);
    } else if (pre->parsed()) {
      manifest.command = "preprocess";
      const auto text = read_all(input, in);
      manifest.add_input(input, text);
      const auto loaded = load_input(text, prep_options);
      prep_options = loaded.options;
      prep_config();
      write_to(output, dump(preprocess_json(loaded, manifest.digest())), out);
    } else if (sta->parsed()) {
      manifest.command = "stats";
      const auto text = read_all(input, in);
      manifest.add_input(input, text);
      if (name.empty()) name = default_name(input);
      manifest.config = {{"name", name}};
      const auto loaded = load_input(text, prep_options);
      const auto stats = resource_stats(loaded.normalized);
      const auto per_resource = stats_csv(name, loaded.normalized, stats);
      const auto summary = summary_csv(name, stats, loaded.prep.n_prime());
      if (summary_path.empty()) {
        write_to(output, per_resource + "\n" + summary, out);
      } else {
        write_to(output, per_resource, out);
        write_to(summary_path, summary, out);
      }
    } else if (bld->parsed()) {
      manifest.command = "build";
      const auto text = read_all(input, in);
      manifest.add_input(input, text);
      auto loaded = load_input(text, prep_options);
      prep_options = loaded.options;
      prep_config();
      const auto kind = *parse_formulation_kind(formulation_text);
      const auto objective = *parse_objective_kind(objective_text);
      manifest.config.emplace_back("formulation", formulation_text);
      manifest.config.emplace_back("objective", objective_text);
      manifest.config.emplace_back("format", format_text);
      const auto digest = manifest.digest();
      const auto f = build_formulation(kind, loaded.normalized, loaded.prep, objective);
      const auto ms = report_model(f.model);

      std::string model_text;
      if (format_text == "lp") {
        model_text = "\\ manifest " + digest + "\n" + write_lp(f.model);
      } else {
        const auto mps = write_mps(f.model);
        model_text = "* manifest " + digest + "\n" + mps.text;
        if (!mps.renamed.empty()) {
          std::string map_path = name_map_path;
          if (map_path.empty() && output != "-") map_path = output + ".names.csv";
          if (map_path.empty()) {
            err << "warning: MPS names were shortened; pass --name-map to keep the mapping\n";
          } else {
            write_to(map_path, mps.name_map_csv(), out);
          }
        }
      }
      write_to(output, model_text, out);

      ordered_json side;
      side["schema"] = kBuildSchema;
      side["manifest_digest"] = digest;
      side["formulation"] = formulation_text;
      side["objective"] = objective_text;
      if (kind == FormulationKind::Baseline) side["U"] = big_m(loaded.normalized);
      side["mVC"] = ms.continuous_count;
      side["mVB"] = ms.binary_count;
      side["mC"] = ms.constraint_count;
      side["n_prime"] = loaded.prep.n_prime();
      if (sidecar_path.empty() && output != "-") sidecar_path = output + ".json";
      if (!sidecar_path.empty()) write_to(sidecar_path, dump(side), out);
    } else if (sol->parsed()) {
      manifest.command = "solve";
      const auto text = read_all(input, in);
      manifest.add_input(input, text);
      if (name.empty()) name = default_name(input);
      const auto loaded = load_input(text, prep_options);
      prep_options = loaded.options;
      const auto objective = *parse_objective_kind(objective_text);
      const int threads = threads_opt ? *threads_opt : threads_from_env();
      if (threads < 0) throw UsageError("--threads must be non-negative");
      manifest.seed = solve_seed;
      prep_config();
      manifest.config.emplace_back("name", name);
      manifest.config.emplace_back("objective", objective_text);
      manifest.config.emplace_back("method", oracle ? "brute_force" : "branch_and_bound");
      manifest.config.emplace_back("time_limit", format_number(time_limit));
      manifest.config.emplace_back("node_limit", std::to_string(node_limit));
      manifest.config.emplace_back("threads", std::to_string(threads));

      SolveReport report;
      if (oracle) {
        const auto t0 = std::chrono::steady_clock::now();
        report.best = brute_force(loaded.normalized, objective);
        const double best = static_cast<double>(objective_value(report.best, objective));
        report.root_bound = std::numeric_limits<double>::quiet_NaN();
        report.upper_bound = best;
        report.proven_optimal = true;
        report.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } else {
        SolveLimits limits{time_limit, node_limit, threads};
        report = solve_exact(loaded.normalized, loaded.prep, objective, limits);
      }
      const Seconds shift = loaded.normalized.time_shift();
      const Schedule absolute = shifted(report.best, shift);
      const double best = static_cast<double>(objective_value(report.best, objective));

      ordered_json doc;
      doc["schema"] = kSolveSchema;
      doc["manifest_digest"] = manifest.digest();
      doc["instance"] = name;
      doc["objective"] = objective_text;
      doc["method"] = oracle ? "brute_force" : "branch_and_bound";
      doc["formulation"] = "independent";
      doc["threads"] = threads;
      doc["n"] = loaded.normalized.mission_count();
      doc["n_prime"] = loaded.prep.n_prime();
      doc["best_objective"] = best;
      doc["objective_count"] = report.best.objective_count;
      doc["objective_weight"] = report.best.objective_weight;
      doc["bound_source"] = oracle ? "exhaustive" : "combinatorial";
      doc["root_bound"] = nullable(report.root_bound);
      doc["final_bound"] = report.upper_bound;
      doc["gap"] = relative_gap(report.upper_bound, best);
      doc["proven_optimal"] = report.proven_optimal;
      doc["nodes"] = report.nodes;
      doc["runtime"] = report.elapsed;
      doc["schedule"] = schedule_json(loaded.normalized, absolute);
      write_to(output, dump(doc), out);
      if (!schedule_path.empty()) {
        write_to(schedule_path, write_schedule_csv(loaded.normalized, report.best, shift), out);
      }
    } else if (val->parsed()) {
      manifest.command = "validate";
      if (input == "-" && schedule_in == "-") throw UsageError("only one input may be stdin");
      const auto text = read_all(input, in);
      const auto csv = read_all(schedule_in, in);
      manifest.add_input(input, text);
      manifest.add_input(schedule_in, csv);
      const auto loaded = load_input(text, prep_options);
      const auto schedule = read_schedule_csv(loaded.raw, csv, 0.0);
      const auto result = validate(loaded.raw, schedule);

      ordered_json doc;
      doc["schema"] = kValidationSchema;
      doc["manifest_digest"] = manifest.digest();
      doc["ok"] = result.ok();
      doc["assignments"] = schedule.assignments.size();
      doc["findings"] = ordered_json::array();
      for (const auto& f : result.findings) {
        doc["findings"].push_back({{"code", to_string(f.code)},
                                   {"mission", f.mission},
                                   {"resource", f.resource},
                                   {"detail", f.detail}});
      }
      write_to(output, dump(doc), out);
      status = result.ok() ? 0 : 1;
    } else if (rep->parsed()) {
      manifest.command = "report";
      std::vector<nlohmann::json> reports;
      for (const auto& path : report_inputs) {
        const auto text = read_all(path, in);
        manifest.add_input(path, text);
        reports.push_back(nlohmann::json::parse(text));
      }
      write_to(output, report_csv(reports), out);
    }
  } catch (const UsageError& e) {
    err << "satsched: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "satsched: " << e.what() << "\n";
    return 1;
  }

  if (!manifest_path.empty()) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
      write_to(manifest_path, dump(manifest.to_json(wall)), out);
    } catch (const std::exception& e) {
      err << "satsched: " << e.what() << "\n";
      return 1;
    }
  }
  return status;
}

}  // namespace satsched::cli
