#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsi/catalog.hpp"
#include "gsi/engine.hpp"
#include "gsi/serialize.hpp"
#include "gsi/tables.hpp"
#include "gsi/verify.hpp"

namespace gsi::cli {

namespace detail {

/// Accepts both "1,2,3" and "[1,2,3]"; "" and "[]" mean the empty set.
inline SubsetMask parse_subset_arg(const std::string& text, int dim) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty() || t == "[]") return SubsetMask::empty_set(dim);
  if (t.front() == '[') return SubsetMask::parse(t, dim);
  return SubsetMask::parse("[" + t + "]", dim);
}

inline void emit(const std::string& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file '" + out_path + "'");
  file << payload;
  if (!file) throw std::runtime_error("failed while writing '" + out_path + "'");
}

inline std::string list_text() {
  const auto& entries = catalog_entries();
  std::size_t name_w = 4, arg_w = 9, cost_w = 4, struct_w = 9;
  for (const CatalogEntryInfo& e : entries) {
    name_w = std::max(name_w, e.name.size());
    arg_w = std::max(arg_w, e.arguments.size());
    cost_w = std::max(cost_w, e.cost_formula.size());
    struct_w = std::max(struct_w, e.structure.size());
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::ostringstream os;
  os << pad("name", name_w) << "  " << pad("arguments", arg_w) << "  "
     << pad("cost", cost_w) << "  " << pad("structure", struct_w) << "  target\n";
  for (const CatalogEntryInfo& e : entries)
    os << pad(e.name, name_w) << "  " << pad(e.arguments, arg_w) << "  "
       << pad(e.cost_formula, cost_w) << "  " << pad(e.structure, struct_w) << "  "
       << e.target << '\n';
  return os.str();
}

inline std::string list_csv() {
  std::ostringstream os;
  os << "name,target,arguments,cost,structure\n";
  for (const CatalogEntryInfo& e : catalog_entries())
    os << gsi::detail::csv_quote(e.name) << ',' << gsi::detail::csv_quote(e.target) << ','
       << gsi::detail::csv_quote(e.arguments) << ','
       << gsi::detail::csv_quote(e.cost_formula) << ','
       << gsi::detail::csv_quote(e.structure) << '\n';
  return os.str();
}

inline std::string list_json() {
  nlohmann::json entries = nlohmann::json::array();
  for (const CatalogEntryInfo& e : catalog_entries())
    entries.push_back({{"name", e.name},
                       {"target", e.target},
                       {"arguments", e.arguments},
                       {"cost", e.cost_formula},
                       {"structure", e.structure}});
  return nlohmann::json{{"entries", entries}}.dump(2) + "\n";
}

inline std::string results_text(const std::vector<EstimateResult>& results) {
  std::size_t name_w = 4;
  for (const EstimateResult& r : results) name_w = std::max(name_w, r.name.size());
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::ostringstream os;
  os << pad("name", name_w)
     << "  estimate      std_error     pairs     reps  evals/pair  estimator\n";
  for (const EstimateResult& r : results) {
    std::ostringstream est, se;
    est << std::scientific << std::setprecision(6) << r.estimate;
    se << std::scientific << std::setprecision(6) << r.std_error;
    os << pad(r.name, name_w) << "  " << est.str() << "  " << se.str() << "  "
       << std::setw(8) << r.pairs << "  " << std::setw(4) << r.replicates << "  "
       << std::setw(10) << r.evals_per_pair << "  " << to_string(r.kind) << '\n';
  }
  return os.str();
}

struct EstimateArgs {
  std::string model;
  std::string estimator;
  std::string spec_file;
  std::string u_text;
  std::string w1_text;
  bool u_given = false;
  bool w1_given = false;
  bool extended = false;
  bool bias_corrected = false;
  long long pairs = 10'000;
  int reps = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "json";
  std::string out_path;
};

inline int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  if (a.estimator.empty() == a.spec_file.empty())
    throw std::invalid_argument("provide exactly one of --estimator or --spec-file");

  const AnyModel model = parse_model(a.model);
  const int dim = model_dimension(model);

  std::vector<NamedSpec> specs;
  nlohmann::json params{{"model", a.model}};
  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    if (!in) throw std::invalid_argument("cannot open spec file '" + a.spec_file + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("spec file '" + a.spec_file + "': " + e.what());
    }
    std::string name = j.value("name", std::string());
    if (name.empty()) {
      name = a.spec_file;
      if (const std::size_t slash = name.find_last_of("/\\"); slash != std::string::npos)
        name = name.substr(slash + 1);
      if (const std::size_t dot = name.rfind('.'); dot != std::string::npos && dot > 0)
        name = name.substr(0, dot);
    }
    specs.push_back({std::move(name), spec_from_json(j)});
    params["spec_file"] = a.spec_file;
  } else {
    std::optional<SubsetMask> u, w1;
    if (a.u_given) {
      u = parse_subset_arg(a.u_text, dim);
      params["u"] = subset_to_json(*u);
    }
    if (a.w1_given) {
      w1 = parse_subset_arg(a.w1_text, dim);
      params["w1"] = subset_to_json(*w1);
    }
    specs = make_catalog_specs(a.estimator, dim, u, w1, a.extended);
    params["estimator"] = a.estimator;
  }

  SampleConfig cfg;
  cfg.pairs = a.pairs;
  cfg.seed = a.seed;
  cfg.replicates = a.reps;
  cfg.workers = a.workers;

  const bool corrected = a.bias_corrected || a.reps > 1;
  std::vector<EstimateResult> results;
  if (specs.size() == 1) {
    EstimateResult r = std::visit(
        [&](const auto& m) {
          return corrected ? estimate_bias_corrected(specs[0].spec, m, cfg)
                           : estimate(specs[0].spec, m, cfg);
        },
        model);
    r.name = specs[0].name;
    results.push_back(std::move(r));
  } else {
    if (corrected)
      throw std::invalid_argument(
          "replicated bias-corrected runs apply to a single design; drop --reps or pick "
          "one estimator");
    std::vector<GsiSpec> bare;
    bare.reserve(specs.size());
    for (const NamedSpec& n : specs) bare.push_back(n.spec);
    results = std::visit([&](const auto& m) { return estimate_batch(bare, m, cfg); }, model);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].name = specs[i].name;
  }

  std::string payload;
  if (a.format == "json") {
    if (results.size() == 1) {
      nlohmann::json j = result_to_json(results[0], a.seed);
      j["params"] = params;
      payload = j.dump(2) + "\n";
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const EstimateResult& r : results) {
        nlohmann::json j = result_to_json(r, a.seed);
        j["params"] = params;
        arr.push_back(std::move(j));
      }
      payload = arr.dump(2) + "\n";
    }
  } else if (a.format == "csv") {
    std::ostringstream os;
    os << results_csv_header() << '\n';
    for (const EstimateResult& r : results) os << result_to_csv(r, a.seed) << '\n';
    payload = os.str();
  } else {
    payload = results_text(results);
  }
  emit(payload, a.out_path, out);
  return 0;
}

struct TableArgs {
  int which = 1;
  double scale = 1.0;
  std::optional<long long> pairs;
  std::optional<int> reps;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "text";
  std::string out_path;
};

inline int cmd_table(const TableArgs& a, std::ostream& out) {
  auto scaled = [&](long long full, long long floor_at) {
    return std::max(floor_at, static_cast<long long>(double(full) / a.scale));
  };
  std::string payload;
  if (a.which == 1) {
    const long long budget = a.pairs ? *a.pairs : scaled(1'000'000, 100);
    const Table1 t = run_table1(budget, a.seed, a.workers);
    payload = a.format == "json"  ? to_json(t).dump(2) + "\n"
              : a.format == "csv" ? to_csv(t)
                                  : to_text(t);
  } else if (a.which == 2) {
    const long long pairs = a.pairs ? *a.pairs : scaled(10'000, 2);
    const int reps = a.reps ? *a.reps : static_cast<int>(scaled(10'000, 2));
    const Table2 t = run_table2(pairs, reps, a.seed, a.workers);
    payload = a.format == "json"  ? to_json(t).dump(2) + "\n"
              : a.format == "csv" ? to_csv(t)
                                  : to_text(t);
  } else {
    const long long pairs = a.pairs ? *a.pairs : scaled(1'000'000, 2);
    const int reps = a.reps ? *a.reps : static_cast<int>(scaled(50, 2));
    const Table3 t = run_table3(pairs, reps, a.seed, a.workers);
    payload = a.format == "json"  ? to_json(t).dump(2) + "\n"
              : a.format == "csv" ? to_csv(t)
                                  : to_text(t);
  }
  emit(payload, a.out_path, out);
  return 0;
}

inline int cmd_verify(const std::string& format, const std::string& out_path,
                      std::ostream& out) {
  const std::vector<SuiteResult> suites = run_verification();
  int passed = 0;
  for (const SuiteResult& s : suites) passed += s.passed ? 1 : 0;

  std::string payload;
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const SuiteResult& s : suites)
      arr.push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
    payload = nlohmann::json{{"suites", arr},
                             {"passed", passed},
                             {"total", static_cast<int>(suites.size())}}
                  .dump(2) +
              "\n";
  } else {
    std::ostringstream os;
    for (const SuiteResult& s : suites)
      os << (s.passed ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.detail << '\n';
    os << passed << '/' << suites.size() << " suites passed\n";
    payload = os.str();
  }
  emit(payload, out_path, out);
  return passed == static_cast<int>(suites.size()) ? 0 : 3;
}

}  // namespace detail

/// Entry point shared by the binary and the in-process CLI tests.
/// Exit codes: 0 success, 2 usage or input error, 3 verification failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Monte Carlo estimation of generalized Sobol' indices"};
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "Show the design catalog");
  std::string list_format = "text", list_out;
  list_cmd->add_option("--format", list_format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  list_cmd->add_option("--out", list_out, "Write output to a file");

  CLI::App* est_cmd = app.add_subcommand("estimate", "Run one estimator on a model");
  detail::EstimateArgs ea;
  est_cmd->add_option("--model", ea.model,
                      "Model: min:d=5, product:mu=...;tau=..., grid file, JSON file or "
                      "inline JSON")
      ->required();
  est_cmd->add_option("--estimator", ea.estimator, "Catalog design name (see list)");
  est_cmd->add_option("--spec-file", ea.spec_file, "JSON file with an explicit weight matrix");
  CLI::Option* u_opt =
      est_cmd->add_option("--u,--w", ea.u_text, "Target subset, e.g. 1,2,3 or [1,2,3]");
  CLI::Option* w1_opt =
      est_cmd->add_option("--w1", ea.w1_text, "Split part for the bilinear designs");
  est_cmd->add_flag("--extended", ea.extended,
                    "Include the pairwise lower-index designs in the batched family");
  est_cmd->add_flag("--bias-corrected", ea.bias_corrected,
                    "Use the exactly unbiased estimator form");
  est_cmd->add_option("--n", ea.pairs, "Sample pairs")->check(CLI::PositiveNumber);
  est_cmd->add_option("--reps", ea.reps,
                      "Independent replicates; above one implies --bias-corrected")
      ->check(CLI::PositiveNumber);
  est_cmd->add_option("--seed", ea.seed, "Stream seed")->envname("GSI_SEED");
  est_cmd->add_option("--workers", ea.workers, "Worker threads")->check(CLI::PositiveNumber);
  est_cmd->add_option("--format", ea.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  est_cmd->add_option("--out", ea.out_path, "Write output to a file");

  CLI::App* table_cmd =
      app.add_subcommand("table", "Reproduce one of the three comparison studies");
  detail::TableArgs ta;
  table_cmd->add_option("which", ta.which, "Study number")
      ->required()
      ->check(CLI::Range(1, 3));
  table_cmd->add_option("--scale", ta.scale,
                        "Divide the default sample and replicate counts by this factor")
      ->check(CLI::PositiveNumber);
  long long table_pairs = 0;
  int table_reps = 0;
  CLI::Option* tp_opt = table_cmd->add_option("--n", table_pairs,
                                              "Override sample pairs (study 1: evaluation "
                                              "budget)")
                            ->check(CLI::PositiveNumber);
  CLI::Option* tr_opt =
      table_cmd->add_option("--reps", table_reps, "Override replicate count")
          ->check(CLI::PositiveNumber);
  table_cmd->add_option("--seed", ta.seed, "Stream seed")->envname("GSI_SEED");
  table_cmd->add_option("--workers", ta.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  table_cmd->add_option("--format", ta.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  table_cmd->add_option("--out", ta.out_path, "Write output to a file");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the deterministic self-check suites");
  std::string verify_format = "text", verify_out;
  verify_cmd->add_option("--format", verify_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--out", verify_out, "Write output to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list_cmd) {
      detail::emit(list_format == "json"  ? detail::list_json()
                   : list_format == "csv" ? detail::list_csv()
                                          : detail::list_text(),
                   list_out, out);
      return 0;
    }
    if (*est_cmd) {
      ea.u_given = u_opt->count() > 0;
      ea.w1_given = w1_opt->count() > 0;
      return detail::cmd_estimate(ea, out);
    }
    if (*table_cmd) {
      if (tp_opt->count() > 0) ta.pairs = table_pairs;
      if (tr_opt->count() > 0) ta.reps = table_reps;
      return detail::cmd_table(ta, out);
    }
    return detail::cmd_verify(verify_format, verify_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

/// Convenience overload for tests: arguments without the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"gsi_cli"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gsi::cli
