#include <gtest/gtest.h>

#include <map>
#include <set>

#include "rpmforge/rpmforge.hpp"

using namespace rpmforge;

TEST(Generator, SameSeedSameProblem) {
  for (auto cfg : kAllConfigurations) {
    EXPECT_EQ(generate_problem(cfg, RuleSet::all(), 77), generate_problem(cfg, RuleSet::all(), 77));
  }
  EXPECT_NE(generate_problem(Configuration::Grid3x3, RuleSet::all(), 1),
            generate_problem(Configuration::Grid3x3, RuleSet::all(), 2));
}

TEST(Generator, CenterConstantPanelsMatchUpToAngle) {
  const auto p = generate_problem(Configuration::Center, RuleSet{RuleKind::Constant}, 5);
  for (const auto& a : p.assignments)
    for (const auto& r : a.slots) EXPECT_EQ(r.kind, RuleKind::Constant);
  const Entity first = *p.context[0].components[0].slots[0];
  for (const auto& panel : p.context) {
    const Entity e = *panel.components[0].slots[0];
    EXPECT_EQ(e.type_idx, first.type_idx);
    EXPECT_EQ(e.size_idx, first.size_idx);
    EXPECT_EQ(e.color_idx, first.color_idx);
    EXPECT_EQ(e.bbox, first.bbox);
  }
  EXPECT_TRUE(same_governed(p.correct_panel(), p.context[0]));
}

TEST(Generator, RulesPresentAndIds) {
  const auto p = generate_problem(Configuration::LeftRight, RuleSet::all(), 3, "l_r_9");
  EXPECT_EQ(p.id, "l_r_9");
  EXPECT_EQ(p.rules_present, rules_in(p.assignments));
  EXPECT_EQ(generate_problem(Configuration::Center, RuleSet::all(), 3).id, "center_s3");
}

TEST(Generator, OnlyAllowedRulesAppear) {
  const RuleSet allowed{RuleKind::Constant, RuleKind::DistributeThree};
  for (auto cfg : kAllConfigurations) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = generate_problem(cfg, allowed, seed);
      EXPECT_TRUE(p.rules_present.is_subset_of(allowed)) << p.id;
      EXPECT_TRUE(validate_problem(p).empty()) << p.id;
    }
  }
}

TEST(Generator, UnsatisfiableAllowedSet) {
  try {
    generate_problem(Configuration::Center, RuleSet{RuleKind::Arithmetic}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Unsatisfiable);
  }
}

TEST(Generator, AttemptBudgetExhaustion) {
  // A budget of zero attempts can never produce a problem.
  try {
    generate_problem(Configuration::Center, RuleSet::all(), 0, "", 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GenerationExhausted);
  }
}

TEST(Dataset, EmptyCountsGiveEmptyDataset) {
  DatasetSpec spec;
  for (auto cfg : kAllConfigurations) spec.counts[cfg] = 0;
  EXPECT_TRUE(generate_dataset(spec).empty());
}

TEST(Dataset, OrderAndIds) {
  DatasetSpec spec;
  spec.counts = {{Configuration::UpDown, 2}, {Configuration::Center, 3}};
  spec.master_seed = 10;
  const auto ds = generate_dataset(spec);
  ASSERT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds[0].id, "center_0");
  EXPECT_EQ(ds[2].id, "center_2");
  EXPECT_EQ(ds[3].id, "u_d_0");
  EXPECT_EQ(ds[3], generate_problem(Configuration::UpDown, RuleSet::all(),
                                    problem_seed(10, Configuration::UpDown, 0), "u_d_0"));
}

TEST(Dataset, ThreadCountDoesNotChangeOutput) {
  DatasetSpec spec;
  for (auto cfg : kAllConfigurations) spec.counts[cfg] = 15;
  spec.master_seed = 123;
  EXPECT_EQ(generate_dataset(spec, 1), generate_dataset(spec, 4));
}

TEST(Dataset, ErrorNamesProblem) {
  DatasetSpec spec;
  spec.counts = {{Configuration::Center, 1}};
  spec.allowed = RuleSet{RuleKind::Arithmetic};
  try {
    generate_dataset(spec, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Unsatisfiable);
    EXPECT_NE(std::string(e.what()).find("center_0"), std::string::npos);
  }
}

// Every applicable (slot, rule kind) pair shows up somewhere in a large
// sample of each multi-slot configuration.
TEST(Dataset, RuleCoverage) {
  for (auto cfg : {Configuration::Grid2x2, Configuration::Grid3x3, Configuration::OutInGrid}) {
    DatasetSpec spec;
    spec.counts = {{cfg, 2000}};
    spec.master_seed = 7;
    const auto ds = generate_dataset(spec);
    std::set<std::tuple<int, int, int, int>> seen;  // component, attribute, kind, param
    for (const auto& p : ds) {
      for (std::size_t c = 0; c < p.assignments.size(); ++c) {
        for (const auto& r : p.assignments[c].slots) {
          seen.insert({static_cast<int>(c), static_cast<int>(r.attribute), static_cast<int>(r.kind),
                       r.kind == RuleKind::DistributeThree ? 0 : r.param});
        }
      }
    }
    for (int c = 0; c < component_count(cfg); ++c) {
      const ComponentRef ref{cfg, c};
      for (auto a : {AttributeKind::Number, AttributeKind::Position, AttributeKind::Type,
                     AttributeKind::Size, AttributeKind::Color}) {
        if (ref.slots() == 1 && (a == AttributeKind::Number || a == AttributeKind::Position)) continue;
        for (const auto& o : enumerate_applicable_rules(a, ref)) {
          for (int prm : o.params) {
            EXPECT_TRUE(seen.count({c, static_cast<int>(a), static_cast<int>(o.kind),
                                    o.kind == RuleKind::DistributeThree ? 0 : prm}))
                << to_name(cfg) << " comp " << c << ' ' << to_name(a) << ' ' << to_name(o.kind)
                << ' ' << prm;
          }
        }
      }
    }
  }
}
