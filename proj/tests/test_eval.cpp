#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"
#include "rpmforge/rpmforge.hpp"

using namespace rpmforge;

namespace {

std::string data_path(const std::string& name) { return std::string(RPMFORGE_TEST_DATA) + "/" + name; }

TokenSequence toks(std::initializer_list<const char*> xs) { return TokenSequence(xs.begin(), xs.end()); }

}  // namespace

TEST(Metrics, DocumentedExamples) {
  const auto ref = toks({"a", "b", "c", "d", "e"});
  EXPECT_DOUBLE_EQ(token_accuracy(toks({"a", "b", "c", "d", "x"}), ref), 0.8);
  EXPECT_DOUBLE_EQ(token_f1(toks({"a", "b", "c", "d"}), ref), 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(ter(toks({"a", "b", "c", "d", "x"}), ref), 0.2);
  EXPECT_DOUBLE_EQ(ter(TokenSequence{}, ref), 1.0);
  EXPECT_DOUBLE_EQ(token_accuracy(TokenSequence{}, ref), 0.0);
  EXPECT_DOUBLE_EQ(token_f1(TokenSequence{}, ref), 0.0);
  EXPECT_DOUBLE_EQ(token_accuracy(ref, ref), 1.0);
}

TEST(Metrics, ChoiceTieBreaksLow) {
  const std::vector<TokenSequence> choices{toks({"a", "b"}), toks({"a", "c"}), toks({"a", "b"})};
  EXPECT_EQ(select_choice(toks({"a", "x"}), choices), 0);
  EXPECT_EQ(select_choice(toks({"a", "c"}), choices), 1);
}

TEST(Metrics, EmptyReferenceThrows) {
  for (auto f : {&token_accuracy, &token_f1, &ter}) {
    try {
      f(toks({"a"}), TokenSequence{});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::EmptyReference);
    }
  }
}

TEST(Metrics, MatchBruteForceOnRandomFixtures) {
  Rng rng(404);
  const std::vector<std::string> vocab{"[", "]", ",", ";", "0.5", "1", "2", "3", "none"};
  auto random_seq = [&](int lo, int hi) {
    TokenSequence s(static_cast<std::size_t>(rng.between(lo, hi)));
    for (auto& t : s) t = vocab[static_cast<std::size_t>(rng.below(static_cast<int>(vocab.size())))];
    return s;
  };
  for (int fixture = 0; fixture < 100; ++fixture) {
    const auto ref = random_seq(1, 25);
    const auto pred = random_seq(0, 30);
    EXPECT_EQ(token_accuracy(pred, ref), oracle::token_accuracy(pred, ref));
    EXPECT_EQ(token_f1(pred, ref), oracle::f1(pred, ref));
    EXPECT_EQ(ter(pred, ref), oracle::ter(pred, ref));
    std::vector<TokenSequence> choices;
    for (int i = 0; i < 8; ++i) choices.push_back(random_seq(1, 20));
    EXPECT_EQ(select_choice(pred, choices), oracle::select_choice(pred, choices));
  }
}

TEST(Evaluate, IdErrorsAndMissing) {
  DatasetSpec spec;
  spec.counts = {{Configuration::Center, 2}, {Configuration::UpDown, 1}};
  const auto ds = generate_dataset(spec);
  const auto target = serialize_problem(ds[0]).target;

  std::vector<PredictionRecord> unknown{{"nope", target}};
  try {
    evaluate(ds, unknown);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownId);
  }
  std::vector<PredictionRecord> dup{{"center_0", target}, {"center_0", target}};
  try {
    evaluate(ds, dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateId);
  }

  std::vector<PredictionRecord> one{{"center_0", target}};
  const auto rep = evaluate(ds, one);
  EXPECT_EQ(rep.missing_ids, (std::vector<std::string>{"center_1", "u_d_0"}));
  ASSERT_TRUE(rep.cell(Configuration::Center).has_value());
  EXPECT_DOUBLE_EQ(rep.cell(Configuration::Center)->choice_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(rep.cell(Configuration::Center)->ter, 0.5);
  EXPECT_DOUBLE_EQ(rep.cell(Configuration::UpDown)->ter, 1.0);
  EXPECT_FALSE(rep.cell(Configuration::Grid3x3).has_value());
}

TEST(Evaluate, PerfectPredictions) {
  DatasetSpec spec;
  for (auto cfg : kAllConfigurations) spec.counts[cfg] = 5;
  const auto ds = generate_dataset(spec);
  std::vector<PredictionRecord> preds;
  for (const auto& p : ds) preds.push_back({p.id, serialize_problem(p).target});
  const auto rep = evaluate(ds, preds);
  ASSERT_TRUE(rep.average.has_value());
  EXPECT_DOUBLE_EQ(rep.average->choice_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(rep.average->token_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(rep.average->ter, 0.0);
}

TEST(Evaluate, GoldenReport) {
  const auto ds = read_dataset(data_path("golden_fixture.jsonl"));
  for (const auto& p : ds.problems) EXPECT_TRUE(validate_problem(p).empty()) << p.id;
  auto rep = evaluate(ds.problems, read_predictions(data_path("golden_predictions.jsonl")));
  rep.model = "golden";
  rep.scenario = "fixture";

  std::ifstream in(data_path("golden_report.json"));
  const auto golden = report_from_json(Json::parse(in));
  for (auto cfg : kAllConfigurations) {
    ASSERT_EQ(rep.cell(cfg).has_value(), golden.cell(cfg).has_value()) << to_name(cfg);
    if (!rep.cell(cfg)) continue;
    const auto& a = *rep.cell(cfg);
    const auto& b = *golden.cell(cfg);
    EXPECT_EQ(a.count, b.count);
    EXPECT_NEAR(a.token_accuracy, b.token_accuracy, 5e-5) << to_name(cfg);
    EXPECT_NEAR(a.choice_accuracy, b.choice_accuracy, 5e-5) << to_name(cfg);
    EXPECT_NEAR(a.f1, b.f1, 5e-5) << to_name(cfg);
    EXPECT_NEAR(a.ter, b.ter, 5e-5) << to_name(cfg);
  }
  ASSERT_TRUE(rep.average.has_value());
  EXPECT_NEAR(rep.average->token_accuracy, 0.7282, 5e-5);
  EXPECT_NEAR(rep.average->choice_accuracy, 0.25, 5e-5);
  EXPECT_NEAR(rep.average->f1, 0.8122, 5e-5);
  EXPECT_NEAR(rep.average->ter, 0.2718, 5e-5);

  const auto md = report_to_markdown(rep);
  EXPECT_NE(md.find("| Accuracy (by token) | 97.06% | n/a | n/a | n/a | n/a | 48.57% | n/a | 72.82% |"),
            std::string::npos)
      << md;
  EXPECT_NE(md.find("| TER | 0.0294 |"), std::string::npos);
  EXPECT_NE(md.find("| 2x2 |"), std::string::npos);
}

TEST(Report, JsonRoundTripAndComparison) {
  MetricsReport a;
  a.model = "LSTM";
  a.scenario = "all_rules";
  a.per_config[0] = MetricCell{10, 0.5, 0.4, 0.6, 0.3};
  a.average = a.per_config[0];
  const auto back = report_from_json(report_to_json(a));
  EXPECT_EQ(report_to_json(back), report_to_json(a));

  MetricsReport b = a;
  b.scenario = "remove_1";
  b.average->choice_accuracy = 0.2;
  const std::vector<MetricsReport> runs{a, b};
  const auto md = comparison_markdown(runs);
  EXPECT_NE(md.find("| LSTM | 40.00 | 20.00 |"), std::string::npos) << md;
  const auto csv = plot_data_csv(runs);
  EXPECT_NE(csv.find("LSTM,remove_1,0.200000"), std::string::npos) << csv;
  EXPECT_THROW(report_from_json(Json{{"model", "x"}}), Error);
}
