#pragma once

// rpmforge command line: generate, split, export-corpus, audit, solve, eval,
// report. `run` is the whole program minus process plumbing so tests can
// drive it in-process.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpmforge/rpmforge.hpp"

namespace rpmforge::cli {

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline RuleSet parse_rules(const std::string& s) {
  if (s == "all") return RuleSet::all();
  RuleSet set;
  for (const auto& name : split_list(s)) {
    const auto k = from_name<RuleKind>(name);
    if (!k) throw Error(Errc::InvalidArgument, "unknown rule '" + name + "'");
    set.insert(*k);
  }
  if (set.empty()) throw Error(Errc::InvalidArgument, "empty rule list");
  return set;
}

inline std::vector<Configuration> parse_configs(const std::string& s) {
  if (s == "all") return {kAllConfigurations.begin(), kAllConfigurations.end()};
  std::vector<Configuration> out;
  for (const auto& name : split_list(s)) {
    const auto c = from_name<Configuration>(name);
    if (!c) throw Error(Errc::InvalidArgument, "unknown configuration '" + name + "'");
    if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
  }
  if (out.empty()) throw Error(Errc::InvalidArgument, "empty configuration list");
  return out;
}

inline Json rule_names(RuleSet s) {
  Json j = Json::array();
  for (auto k : s.kinds()) j.push_back(to_name(k));
  return j;
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("RPMFORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, std::string("RPMFORGE_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

/// Generated count per configuration: the metadata record when present,
/// otherwise a count of the problems themselves.
inline std::map<Configuration, std::size_t> config_counts(const Dataset& ds) {
  std::map<Configuration, std::size_t> counts;
  const Json* meta_counts = nullptr;
  if (ds.meta.contains("counts")) meta_counts = &ds.meta.at("counts");
  if (meta_counts && meta_counts->is_object()) {
    for (const auto& [name, n] : meta_counts->items()) {
      if (auto c = from_name<Configuration>(name)) counts[*c] = n.get<std::size_t>();
    }
    return counts;
  }
  for (const auto& p : ds.problems) ++counts[p.configuration];
  return counts;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, path + ": " + e.what());
  }
}

inline void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << Json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic Raven's Progressive Matrices workbench", "rpmforge"};
  app.require_subcommand(1);

  // generate
  std::string gen_config = "all", gen_rules = "all", gen_out;
  int gen_count = 0, gen_attempts = kDefaultAttemptBudget;
  std::uint64_t gen_seed = 0;
  unsigned gen_threads = 1;
  auto* gen = app.add_subcommand("generate", "Generate a JSONL dataset");
  gen->add_option("--config", gen_config, "Configurations (comma list or 'all')");
  gen->add_option("--count", gen_count, "Problems per configuration")->required()->check(CLI::NonNegativeNumber);
  auto* seed_opt = gen->add_option("--seed", gen_seed, "Master seed (default $RPMFORGE_SEED or 0)");
  gen->add_option("--allowed-rules", gen_rules, "Allowed rule kinds (comma list or 'all')");
  gen->add_option("--threads", gen_threads, "Worker threads")->check(CLI::PositiveNumber);
  gen->add_option("--max-attempts", gen_attempts, "Rejection budget per problem")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output dataset path")->required();

  // split
  std::string split_in, split_out, split_omit, split_mode, split_partition;
  auto* split = app.add_subcommand("split", "Filter a dataset by omitted rules");
  split->add_option("--in", split_in, "Input dataset")->required();
  split->add_option("--omit", split_omit, "Omitted rules, e.g. progression,arithmetic")->required();
  split->add_option("--mode", split_mode, "train_without | test_same | test_different")->required();
  split->add_option("--partition", split_partition,
                    "train | val | test | all (default: train for train_without, test otherwise)");
  split->add_option("--out", split_out, "Output dataset path")->required();

  // export-corpus
  std::string exp_in, exp_out, exp_ids, exp_choices;
  auto* exp = app.add_subcommand("export-corpus", "Write source<TAB>target training text");
  exp->add_option("--in", exp_in, "Input dataset")->required();
  exp->add_option("--out", exp_out, "Corpus path")->required();
  exp->add_option("--ids", exp_ids, "Write problem ids, one per corpus line");
  exp->add_option("--choices", exp_choices, "Write candidate sequences as JSONL");

  // audit
  std::string audit_in, audit_json;
  auto* audit = app.add_subcommand("audit", "Context-blind answer-set audit");
  audit->add_option("--in", audit_in, "Input dataset")->required();
  audit->add_option("--json", audit_json, "Also write the report as JSON");

  // solve
  std::string solve_in;
  auto* solve_cmd = app.add_subcommand("solve", "Run the oracle solver over a dataset");
  solve_cmd->add_option("--in", solve_in, "Input dataset")->required();

  // eval
  std::string ev_dataset, ev_preds, ev_out, ev_json, ev_csv, ev_model = "model", ev_scenario = "scenario";
  auto* ev = app.add_subcommand("eval", "Score a predictions file");
  ev->add_option("--dataset", ev_dataset, "Dataset the predictions refer to")->required();
  ev->add_option("--predictions", ev_preds, "Predictions JSONL {id, tokens}")->required();
  ev->add_option("--out", ev_out, "Markdown report path");
  ev->add_option("--json", ev_json, "JSON report path (input to 'report')");
  ev->add_option("--csv", ev_csv, "CSV report path");
  ev->add_option("--model", ev_model, "Model label");
  ev->add_option("--scenario", ev_scenario, "Scenario label, e.g. remove1_different");

  // report
  std::vector<std::string> rep_merge;
  std::string rep_out, rep_plot;
  auto* rep = app.add_subcommand("report", "Compare several eval runs");
  rep->add_option("--merge", rep_merge, "JSON reports from 'eval --json'")->required();
  rep->add_option("--out", rep_out, "Markdown output path (default: stdout)");
  rep->add_option("--plot-data", rep_plot, "CSV of scenario averages");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    detail::report_error(err, "invalid_argument", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      DatasetSpec spec;
      const auto configs = detail::parse_configs(gen_config);
      for (auto c : configs) spec.counts[c] = gen_count;
      spec.allowed = detail::parse_rules(gen_rules);
      spec.master_seed = seed_opt->count() > 0 ? gen_seed : detail::default_seed();
      spec.max_attempts = gen_attempts;

      Dataset ds;
      Json cfg_names = Json::array();
      Json counts = Json::object();
      for (auto c : configs) {
        cfg_names.push_back(to_name(c));
        counts[std::string(to_name(c))] = gen_count;
      }
      ds.meta = Json{{"tool", "rpmforge"},
                     {"format_version", 1},
                     {"command", "generate"},
                     {"config", cfg_names},
                     {"count", gen_count},
                     {"seed", spec.master_seed},
                     {"allowed_rules", detail::rule_names(spec.allowed)},
                     {"max_attempts", gen_attempts},
                     {"counts", counts}};
      ds.problems = generate_dataset(spec, gen_threads);
      write_dataset(ds, gen_out);
      out << "wrote " << ds.problems.size() << " problems to " << gen_out << '\n';
      return 0;
    }

    if (split->parsed()) {
      const auto mode = split_mode_from_name(split_mode);
      if (!mode) throw Error(Errc::InvalidArgument, "unknown mode '" + split_mode + "'");
      if (split_partition.empty()) {
        split_partition = *mode == SplitMode::TrainWithout ? "train" : "test";
      }
      const auto part = partition_from_name(split_partition);
      if (!part) throw Error(Errc::InvalidArgument, "unknown partition '" + split_partition + "'");
      const RuleSet omitted = detail::parse_rules(split_omit);

      const Dataset in = read_dataset(split_in);
      const auto counts = detail::config_counts(in);
      const auto pool = select_partition(in.problems, *part, counts);
      auto result = filter_by_rules(pool, omitted, *mode);

      Dataset ds;
      Json counts_json = Json::object();
      for (const auto& [c, n] : counts) counts_json[std::string(to_name(c))] = n;
      ds.meta = Json{{"tool", "rpmforge"},
                     {"format_version", 1},
                     {"command", "split"},
                     {"omit", detail::rule_names(omitted)},
                     {"mode", to_name(*mode)},
                     {"partition", to_name(*part)},
                     {"counts", counts_json},
                     {"source", in.meta}};
      ds.problems = std::move(result.problems);
      write_dataset(ds, split_out);
      if (result.warning) {
        err << Json{{"warning", "empty_split"}, {"message", *result.warning}}.dump() << '\n';
      }
      out << "kept " << ds.problems.size() << " of " << pool.size() << " problems ("
          << to_name(*part) << " partition)\n";
      return 0;
    }

    if (exp->parsed()) {
      const Dataset in = read_dataset(exp_in);
      std::ofstream corpus(exp_out, std::ios::binary | std::ios::trunc);
      if (!corpus) throw Error(Errc::IoError, "cannot open '" + exp_out + "' for writing");
      std::ofstream ids, choices;
      if (!exp_ids.empty()) {
        ids.open(exp_ids, std::ios::binary | std::ios::trunc);
        if (!ids) throw Error(Errc::IoError, "cannot open '" + exp_ids + "' for writing");
      }
      if (!exp_choices.empty()) {
        choices.open(exp_choices, std::ios::binary | std::ios::trunc);
        if (!choices) throw Error(Errc::IoError, "cannot open '" + exp_choices + "' for writing");
      }
      write_corpus_streams(in.problems, corpus, exp_ids.empty() ? nullptr : &ids,
                           exp_choices.empty() ? nullptr : &choices);
      out << "exported " << in.problems.size() << " problems to " << exp_out << '\n';
      return 0;
    }

    if (audit->parsed()) {
      const Dataset in = read_dataset(audit_in);
      const auto report = audit_context_blind(in.problems);
      out << "problems " << report.problems << '\n';
      out << "heuristic        hit_rate\n";
      Json j{{"problems", report.problems}, {"heuristics", Json::object()}};
      for (const auto& r : report.results) {
        std::string name(to_name(r.heuristic));
        name.resize(16, ' ');
        char rate[16];
        std::snprintf(rate, sizeof rate, "%.4f", r.hit_rate);
        out << name << ' ' << rate << '\n';
        j["heuristics"][std::string(to_name(r.heuristic))] = r.hit_rate;
      }
      if (!audit_json.empty()) detail::write_text(audit_json, j.dump(2) + "\n");
      return 0;
    }

    if (solve_cmd->parsed()) {
      const Dataset in = read_dataset(solve_in);
      if (in.problems.empty()) throw Error(Errc::InvalidArgument, "dataset has no problems");
      std::size_t correct = 0, ambiguous = 0, unsolved = 0;
      for (const auto& p : in.problems) {
        const auto o = try_solve(p);
        if (o.status == SolveStatus::Ambiguous) ++ambiguous;
        if (o.status == SolveStatus::NoSolution) ++unsolved;
        if (o.status == SolveStatus::Unique && o.choice == p.correct_index) ++correct;
      }
      char acc[16];
      std::snprintf(acc, sizeof acc, "%.4f",
                    static_cast<double>(correct) / static_cast<double>(in.problems.size()));
      out << "accuracy " << acc << '\n'
          << "problems " << in.problems.size() << " ambiguous " << ambiguous << " no_solution "
          << unsolved << '\n';
      if (correct != in.problems.size()) {
        detail::report_error(err, ambiguous > 0 ? "ambiguous" : "no_solution",
                             std::to_string(in.problems.size() - correct) +
                                 " problems not solved uniquely");
        return 1;
      }
      return 0;
    }

    if (ev->parsed()) {
      const Dataset in = read_dataset(ev_dataset);
      const auto preds = read_predictions(ev_preds);
      auto report = evaluate(in.problems, preds);
      report.model = ev_model;
      report.scenario = ev_scenario;
      const auto md = report_to_markdown(report);
      if (ev_out.empty()) {
        out << md;
      } else {
        detail::write_text(ev_out, md);
      }
      if (!ev_json.empty()) detail::write_text(ev_json, report_to_json(report).dump(2) + "\n");
      if (!ev_csv.empty()) detail::write_text(ev_csv, report_to_csv(report));
      if (!report.missing_ids.empty()) {
        err << Json{{"warning", "missing_predictions"}, {"ids", report.missing_ids}}.dump() << '\n';
      }
      return 0;
    }

    if (rep->parsed()) {
      std::vector<MetricsReport> runs;
      for (const auto& path : rep_merge) runs.push_back(report_from_json(detail::read_json_file(path)));
      const auto md = comparison_markdown(runs);
      if (rep_out.empty()) {
        out << md;
      } else {
        detail::write_text(rep_out, md);
      }
      if (!rep_plot.empty()) detail::write_text(rep_plot, plot_data_csv(runs));
      return 0;
    }
  } catch (const Error& e) {
    detail::report_error(err, errc_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    detail::report_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace rpmforge::cli
