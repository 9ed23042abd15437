#pragma once

// Token-level metrics, choice selection, per-configuration reports and
// multi-run comparison tables.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpmforge/core.hpp"
#include "rpmforge/textio.hpp"

namespace rpmforge {

// ---------------------------------------------------------------------------
// Metrics

inline void require_reference(const TokenSequence& ref) {
  if (ref.empty()) throw Error(Errc::EmptyReference, "reference sequence is empty");
}

/// Unit-cost token edit distance.
inline std::size_t levenshtein(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Positions i < |ref| where pred[i] == ref[i], over |ref|.
inline double token_accuracy(const TokenSequence& pred, const TokenSequence& ref) {
  require_reference(ref);
  std::size_t hits = 0;
  const std::size_t n = std::min(pred.size(), ref.size());
  for (std::size_t i = 0; i < n; ++i) hits += pred[i] == ref[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ref.size());
}

/// Bag-of-tokens F1 over multiset overlap.
inline double token_f1(const TokenSequence& pred, const TokenSequence& ref) {
  require_reference(ref);
  std::unordered_map<std::string, long> counts;
  for (const auto& t : ref) ++counts[t];
  std::size_t overlap = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

/// Token error rate: edit distance over reference length.
inline double ter(const TokenSequence& pred, const TokenSequence& ref) {
  require_reference(ref);
  return static_cast<double>(levenshtein(pred, ref)) / static_cast<double>(ref.size());
}

/// Candidate nearest to `pred` by edit distance; ties go to the lowest index.
inline int select_choice(const TokenSequence& pred, std::span<const TokenSequence> choices) {
  int best = -1;
  std::size_t best_d = 0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const auto d = levenshtein(pred, choices[i]);
    if (best < 0 || d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Reports

struct MetricCell {
  std::size_t count = 0;
  double token_accuracy = 0;
  double choice_accuracy = 0;
  double f1 = 0;
  double ter = 0;
};

struct MetricsReport {
  std::string model;
  std::string scenario;
  std::array<std::optional<MetricCell>, kAllConfigurations.size()> per_config;
  std::optional<MetricCell> average;  // unweighted mean over present configurations
  std::vector<std::string> missing_ids;
  std::size_t predictions = 0;

  const std::optional<MetricCell>& cell(Configuration cfg) const {
    return per_config[static_cast<std::size_t>(cfg)];
  }
};

/// Scores predictions against each problem's target. A problem without a
/// prediction is listed in `missing_ids` and scored as a total miss (token
/// accuracy 0, F1 0, TER 1, wrong choice).
inline MetricsReport evaluate(std::span<const Problem> problems,
                              std::span<const PredictionRecord> preds) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < problems.size(); ++i) by_id.emplace(problems[i].id, i);
  std::vector<const PredictionRecord*> matched(problems.size(), nullptr);
  for (const auto& r : preds) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw Error(Errc::UnknownId, "prediction for unknown id '" + r.id + "'");
    if (matched[it->second]) throw Error(Errc::DuplicateId, "two predictions for '" + r.id + "'");
    matched[it->second] = &r;
  }

  struct Acc {
    std::size_t n = 0;
    double tok = 0, choice = 0, f1 = 0, ter = 0;
  };
  std::array<Acc, kAllConfigurations.size()> acc{};
  MetricsReport rep;
  rep.predictions = preds.size();
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const Problem& p = problems[i];
    auto& a = acc[static_cast<std::size_t>(p.configuration)];
    ++a.n;
    if (!matched[i]) {
      rep.missing_ids.push_back(p.id);
      a.ter += 1.0;
      continue;
    }
    const auto s = serialize_problem(p);
    const auto& pred = matched[i]->tokens;
    a.tok += token_accuracy(pred, s.target);
    a.f1 += token_f1(pred, s.target);
    a.ter += ter(pred, s.target);
    a.choice += select_choice(pred, s.choices) == p.correct_index ? 1.0 : 0.0;
  }

  MetricCell sum;
  std::size_t present = 0;
  for (std::size_t c = 0; c < acc.size(); ++c) {
    const auto& a = acc[c];
    if (a.n == 0) continue;
    const double n = static_cast<double>(a.n);
    MetricCell cell{a.n, a.tok / n, a.choice / n, a.f1 / n, a.ter / n};
    rep.per_config[c] = cell;
    sum.count += cell.count;
    sum.token_accuracy += cell.token_accuracy;
    sum.choice_accuracy += cell.choice_accuracy;
    sum.f1 += cell.f1;
    sum.ter += cell.ter;
    ++present;
  }
  if (present > 0) {
    const double k = static_cast<double>(present);
    rep.average = MetricCell{sum.count, sum.token_accuracy / k, sum.choice_accuracy / k,
                             sum.f1 / k, sum.ter / k};
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Emitters

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline Json cell_to_json(const std::optional<MetricCell>& c) {
  if (!c) return nullptr;
  return Json{{"count", c->count},
              {"token_accuracy", c->token_accuracy},
              {"choice_accuracy", c->choice_accuracy},
              {"f1", c->f1},
              {"ter", c->ter}};
}

inline std::optional<MetricCell> cell_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  MetricCell c;
  c.count = j.at("count").get<std::size_t>();
  c.token_accuracy = j.at("token_accuracy").get<double>();
  c.choice_accuracy = j.at("choice_accuracy").get<double>();
  c.f1 = j.at("f1").get<double>();
  c.ter = j.at("ter").get<double>();
  return c;
}

struct MetricRow {
  const char* label;
  double MetricCell::*field;
  bool percent;
};

inline constexpr std::array<MetricRow, 4> kMetricRows{{
    {"Accuracy (by token)", &MetricCell::token_accuracy, true},
    {"Accuracy (correct choice)", &MetricCell::choice_accuracy, true},
    {"F1", &MetricCell::f1, false},
    {"TER", &MetricCell::ter, false},
}};

inline std::string format_cell(const std::optional<MetricCell>& c, const MetricRow& row) {
  if (!c) return "n/a";
  const double v = (*c).*(row.field);
  return row.percent ? fixed(100 * v, 2) + "%" : fixed(v, 4);
}

}  // namespace detail

inline Json report_to_json(const MetricsReport& r) {
  Json configs = Json::object();
  for (auto cfg : kAllConfigurations) {
    configs[std::string(to_name(cfg))] = detail::cell_to_json(r.cell(cfg));
  }
  return Json{{"model", r.model},
              {"scenario", r.scenario},
              {"predictions", r.predictions},
              {"configurations", std::move(configs)},
              {"average", detail::cell_to_json(r.average)},
              {"missing_ids", r.missing_ids}};
}

inline MetricsReport report_from_json(const Json& j) {
  MetricsReport r;
  try {
    r.model = j.at("model").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.predictions = j.at("predictions").get<std::size_t>();
    for (auto cfg : kAllConfigurations) {
      r.per_config[static_cast<std::size_t>(cfg)] =
          detail::cell_from_json(j.at("configurations").at(std::string(to_name(cfg))));
    }
    r.average = detail::cell_from_json(j.at("average"));
    r.missing_ids = j.at("missing_ids").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, std::string("malformed report: ") + e.what());
  }
  return r;
}

/// Metric rows by configuration columns, plus an Average column.
inline std::string report_to_markdown(const MetricsReport& r) {
  std::ostringstream out;
  if (!r.model.empty() || !r.scenario.empty()) {
    out << "### " << (r.model.empty() ? "model" : r.model) << " / "
        << (r.scenario.empty() ? "scenario" : r.scenario) << "\n\n";
  }
  out << "| |";
  for (auto cfg : kAllConfigurations) out << ' ' << display_label(cfg) << " |";
  out << " Average |\n|---|";
  for (std::size_t i = 0; i <= kAllConfigurations.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& row : detail::kMetricRows) {
    out << "| " << row.label << " |";
    for (auto cfg : kAllConfigurations) out << ' ' << detail::format_cell(r.cell(cfg), row) << " |";
    out << ' ' << detail::format_cell(r.average, row) << " |\n";
  }
  out << "\nProblems per configuration:";
  for (auto cfg : kAllConfigurations) {
    out << ' ' << to_name(cfg) << '=' << (r.cell(cfg) ? r.cell(cfg)->count : 0);
  }
  out << "\nMissing predictions: " << r.missing_ids.size() << '\n';
  for (const auto& id : r.missing_ids) out << "- " << id << '\n';
  return out.str();
}

inline std::string report_to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "metric";
  for (auto cfg : kAllConfigurations) out << ',' << to_name(cfg);
  out << ",average\n";
  const std::array<const char*, 4> keys{"token_accuracy", "choice_accuracy", "f1", "ter"};
  for (std::size_t i = 0; i < detail::kMetricRows.size(); ++i) {
    const auto field = detail::kMetricRows[i].field;
    out << keys[i];
    for (auto cfg : kAllConfigurations) {
      out << ',';
      if (r.cell(cfg)) out << detail::fixed((*r.cell(cfg)).*field, 6);
    }
    out << ',';
    if (r.average) out << detail::fixed((*r.average).*field, 6);
    out << '\n';
  }
  return out.str();
}

/// Model rows by scenario columns; each cell is the mean correct-choice
/// accuracy (%) over configurations.
inline std::string comparison_markdown(std::span<const MetricsReport> runs) {
  std::vector<std::string> models, scenarios;
  std::map<std::pair<std::string, std::string>, double> cells;
  for (const auto& r : runs) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
      scenarios.push_back(r.scenario);
    }
    if (r.average) cells[{r.model, r.scenario}] = 100 * r.average->choice_accuracy;
  }
  std::ostringstream out;
  out << "| Model |";
  for (const auto& s : scenarios) out << ' ' << s << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < scenarios.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& m : models) {
    out << "| " << m << " |";
    for (const auto& s : scenarios) {
      const auto it = cells.find({m, s});
      out << ' ' << (it == cells.end() ? std::string("n/a") : detail::fixed(it->second, 2)) << " |";
    }
    out << '\n';
  }
  return out.str();
}

/// Scenario averages for external plotting.
inline std::string plot_data_csv(std::span<const MetricsReport> runs) {
  std::ostringstream out;
  out << "model,scenario,choice_accuracy,token_accuracy,f1,ter\n";
  for (const auto& r : runs) {
    out << r.model << ',' << r.scenario;
    if (r.average) {
      out << ',' << detail::fixed(r.average->choice_accuracy, 6) << ','
          << detail::fixed(r.average->token_accuracy, 6) << ',' << detail::fixed(r.average->f1, 6)
          << ',' << detail::fixed(r.average->ter, 6);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rpmforge
