#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "rpmforge/rpmforge.hpp"

using namespace rpmforge;

namespace {

Panel random_panel(Configuration cfg, Rng& rng) {
  Panel p = empty_panel(cfg);
  for (int c = 0; c < component_count(cfg); ++c) {
    const auto boxes = component_slots(cfg, c);
    auto& cp = p.components[static_cast<std::size_t>(c)];
    while (cp.entity_count() == 0) {
      for (std::size_t s = 0; s < boxes.size(); ++s) {
        if (boxes.size() > 1 && rng.coin()) continue;
        cp.slots[s] = Entity{boxes[s], rng.between(1, 5), rng.below(domains::kSizeCount),
                             rng.below(domains::kColorCount), rng.below(domains::kAngleCount)};
      }
    }
  }
  return p;
}

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;  // sentinel: nothing thrown
}

}  // namespace

TEST(Tokens, TokenizeAndRender) {
  const std::string s = "[0.5, 0.5, 1, 1], 3, 3, 5, 7";
  const auto t = tokenize(s);
  EXPECT_EQ(t, (TokenSequence{"[", "0.5", ",", "0.5", ",", "1", ",", "1", "]", ",", "3", ",",
                              "3", ",", "5", ",", "7"}));
  EXPECT_EQ(render(t), s);
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(0.33), "0.33");
}

TEST(Entity, WorkedExampleDecodes) {
  const std::string text = "[0.5, 0.5, 1, 1], 3, 3, 5, 7";
  const Entity e = parse_entity(tokenize(text));
  EXPECT_EQ(domains::kTypeNames[static_cast<std::size_t>(e.type_idx)], "pentagon");
  EXPECT_DOUBLE_EQ(domains::kSizeValues[static_cast<std::size_t>(e.size_idx)], 0.7);
  EXPECT_EQ(domains::kColorValues[static_cast<std::size_t>(e.color_idx)], 112);
  EXPECT_EQ(domains::kAngleValues[static_cast<std::size_t>(e.angle_idx)], 180);
  EXPECT_EQ(e.bbox, (BBox{0.5, 0.5, 1, 1}));
  EXPECT_EQ(render(serialize_entity(e)), text);
}

TEST(Entity, TriangleTemplate) {
  const Entity e{{0.5, 0.5, 1, 1}, 1, 0, 0, 0};
  EXPECT_EQ(render(serialize_entity(e)), "[0.5, 0.5, 1, 1], 1, 0, 0, 0");
}

TEST(Entity, ColorTokenDomain) {
  const Entity e = parse_entity(tokenize("[0.5, 0.5, 1, 1], 2, 1, 7, 0"));
  EXPECT_EQ(domains::kColorValues[static_cast<std::size_t>(e.color_idx)], 56);
  EXPECT_EQ(code_of([] { parse_entity(tokenize("[0.5, 0.5, 1, 1], 2, 1, 11, 0")); }),
            Errc::DomainError);
  EXPECT_EQ(code_of([] { parse_entity(tokenize("[0.5, 0.5, 1, 1], 0, 1, 1, 0")); }),
            Errc::DomainError);
}

TEST(Entity, ParseErrorCarriesPosition) {
  try {
    parse_entity(tokenize("[0.5, 0.5, 1 1], 2, 1, 1, 0"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_EQ(e.position(), 6u);
  }
  EXPECT_EQ(code_of([] { parse_entity(tokenize("[0.5, 0.5, 1, 1], 2, 1, 1")); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { parse_entity(tokenize("[0.5, 0.5, 1, 1], 2, 1, 1, 0 ,")); }),
            Errc::ParseError);
  EXPECT_EQ(code_of([] { parse_entity(tokenize("[a, 0.5, 1, 1], 2, 1, 1, 0")); }), Errc::ParseError);
}

TEST(Panel, RoundTripRandomPanels) {
  Rng rng(31337);
  for (int i = 0; i < 10000; ++i) {
    const auto cfg = kAllConfigurations[static_cast<std::size_t>(rng.below(7))];
    const Panel p = random_panel(cfg, rng);
    const auto text = render(serialize_panel(p));
    const Panel back = parse_panel(text, cfg);
    ASSERT_EQ(back, p) << text;
    ASSERT_EQ(render(serialize_panel(back)), text);
  }
}

TEST(Panel, StructuralErrors) {
  // 2x2 with no entities at all
  EXPECT_EQ(code_of([] { parse_panel("none; none; none; none", Configuration::Grid2x2); }),
            Errc::DomainError);
  // bbox of the wrong slot
  EXPECT_EQ(code_of([] { parse_panel("[0.75, 0.5, 0.5, 1], 1, 0, 0, 0; [0.75, 0.5, 0.5, 1], 1, 0, 0, 0",
                                     Configuration::LeftRight); }),
            Errc::DomainError);
  // missing second component
  EXPECT_EQ(code_of([] { parse_panel("[0.25, 0.5, 0.5, 1], 1, 0, 0, 0", Configuration::LeftRight); }),
            Errc::ParseError);
}

TEST(Problem, SerializeProperties) {
  const auto p = generate_problem(Configuration::Center, RuleSet{RuleKind::Constant}, 12);
  const auto s = serialize_problem(p);
  EXPECT_EQ(s.target, s.choices[static_cast<std::size_t>(p.correct_index)]);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(parse_panel(s.choices[i], p.configuration), p.answer_set[i]);

  // split source on "|" and drop the angle token (the last of each entity)
  std::vector<TokenSequence> bodies(1);
  for (const auto& t : s.source) {
    if (t == "|") bodies.emplace_back();
    else bodies.back().push_back(t);
  }
  ASSERT_EQ(bodies.size(), 8u);
  for (auto& b : bodies) b.pop_back();
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
}

TEST(Dataset, WriteReadIdentity) {
  DatasetSpec spec;
  for (auto cfg : kAllConfigurations) spec.counts[cfg] = 10;
  Dataset ds;
  ds.meta = {{"seed", 1}, {"note", "x"}};
  ds.problems = generate_dataset(spec);
  std::stringstream buf;
  write_dataset_stream(ds, buf);
  const auto text = buf.str();
  const auto back = read_dataset_stream(buf);
  EXPECT_EQ(back, ds);
  std::stringstream again;
  write_dataset_stream(back, again);
  EXPECT_EQ(again.str(), text);
}

TEST(Dataset, SchemaErrorsNameLineAndField) {
  const auto p = generate_problem(Configuration::Center, RuleSet::all(), 1, "center_0");
  auto j = problem_to_json(p);
  j.erase("correct_index");
  std::stringstream in;
  in << Json{{"meta", Json::object()}}.dump() << '\n' << problem_to_json(p).dump() << '\n' << j.dump() << '\n';
  try {
    read_dataset_stream(in);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "correct_index");
  }

  auto bad = problem_to_json(p);
  bad["context"][0] = "[0.5, 0.5, 1, 1], 1, 0, 11, 0";
  std::stringstream in2;
  in2 << bad.dump() << '\n';
  EXPECT_THROW(read_dataset_stream(in2), Error);
}

TEST(Predictions, Formats) {
  std::stringstream in;
  in << R"({"id":"a","tokens":["[","0.5","]"]})" << '\n'
     << R"({"id":"b","tokens":"[0.5, 0.5, 1, 1], 1, 0, 0, 0"})" << '\n';
  const auto preds = read_predictions_stream(in);
  ASSERT_EQ(preds.size(), 2u);
  EXPECT_EQ(preds[0].tokens, (TokenSequence{"[", "0.5", "]"}));
  EXPECT_EQ(preds[1].tokens.size(), 17u);
}

TEST(Predictions, MissingTokensIsSchemaError) {
  std::stringstream in;
  in << R"({"id":"a","tokens":[]})" << '\n' << R"({"id":"b"})" << '\n';
  try {
    read_predictions_stream(in);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "tokens");
  }
}

TEST(Corpus, NoAnswerIndex) {
  DatasetSpec spec;
  spec.counts = {{Configuration::Grid2x2, 3}};
  const auto ds = generate_dataset(spec);
  std::ostringstream corpus, ids, choices;
  write_corpus_streams(ds, corpus, &ids, &choices);
  std::istringstream lines(corpus.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    EXPECT_EQ(line.find('\t', tab + 1), std::string::npos);
    const auto s = serialize_problem(ds[n]);
    EXPECT_EQ(line.substr(0, tab), render(s.source));
    EXPECT_EQ(line.substr(tab + 1), render(s.target));
    ++n;
  }
  EXPECT_EQ(n, 3u);
  EXPECT_EQ(ids.str(), "grid_2x2_0\ngrid_2x2_1\ngrid_2x2_2\n");
  EXPECT_EQ(choices.str().find("correct"), std::string::npos);
}

TEST(Dataset, LargeRoundTripIsFast) {
  DatasetSpec spec;
  for (auto cfg : kAllConfigurations) spec.counts[cfg] = 2000;
  Dataset ds;
  ds.problems = generate_dataset(spec);
  ASSERT_EQ(ds.problems.size(), 14000u);
  const auto t0 = std::chrono::steady_clock::now();
  std::stringstream buf;
  write_dataset_stream(ds, buf);
  const auto back = read_dataset_stream(buf);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(back, ds);
  EXPECT_LT(secs, 10.0);
}
