#pragma once

// Oracle-unique problem sampling and deterministic dataset assembly.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rpmforge/abt.hpp"
#include "rpmforge/core.hpp"
#include "rpmforge/rng.hpp"
#include "rpmforge/rule_engine.hpp"
#include "rpmforge/solver.hpp"

namespace rpmforge {

inline constexpr int kDefaultAttemptBudget = 1000;

namespace detail {

inline int random_nonempty_mask(int n, Rng& rng) { return rng.between(1, (1 << n) - 1); }

/// Values of one slot's attribute over the 3x3 grid, rows[row][column].
/// A Constant value holds for the whole grid, not just within each row.
inline std::array<Row, 3> sample_grid_values(const RuleInstance& r, const ComponentRef& ref,
                                             Rng& rng) {
  const AttributeKind a = r.attribute;
  const int n = ref.slots();
  const auto b = scalar_bounds(a, ref);
  std::array<Row, 3> rows{};
  const int constant = r.kind != RuleKind::Constant       ? 0
                       : a == AttributeKind::Position ? random_nonempty_mask(n, rng)
                                                      : rng.between(b.lo, b.hi);
  for (int ri = 0; ri < 3; ++ri) {
    Row& row = rows[static_cast<std::size_t>(ri)];
    switch (r.kind) {
      case RuleKind::Constant:
        row = {constant, constant, constant};
        break;
      case RuleKind::Progression: {
        const int d = r.param;
        if (a == AttributeKind::Position) {
          int m;
          do {
            m = random_nonempty_mask(n, rng);
          } while (shift_mask(m, d, n) == m);
          row = {m, shift_mask(m, d, n), shift_mask(m, 2 * d, n)};
        } else {
          const int lo = d > 0 ? b.lo : b.lo - 2 * d;
          const int hi = d > 0 ? b.hi - 2 * d : b.hi;
          const int v = rng.between(lo, hi);
          row = {v, v + d, v + 2 * d};
        }
        break;
      }
      case RuleKind::Arithmetic: {
        if (a == AttributeKind::Position) {
          int x, y, z;
          do {
            x = random_nonempty_mask(n, rng);
            y = random_nonempty_mask(n, rng);
            z = r.param > 0 ? (x | y) : (x & ~y);
          } while (z == 0 || z == x);
          row = {x, y, z};
        } else {
          // Non-degenerate pairs: the second operand moves the value.
          std::vector<Row> pairs;
          for (int x = b.lo; x <= b.hi; ++x) {
            for (int y = std::max(b.lo, 1); y <= b.hi; ++y) {
              const int z = r.param > 0 ? x + y : x - y;
              if (z >= b.lo && z <= b.hi) pairs.push_back({x, y, z});
            }
          }
          row = pairs[static_cast<std::size_t>(rng.below(static_cast<int>(pairs.size())))];
        }
        break;
      }
      case RuleKind::DistributeThree:
        row = rotate_left(r.triple, r.permutation + ri);
        break;
    }
  }
  return rows;
}

struct Grid {
  std::array<Panel, 9> panels;
};

inline Grid build_grid(Configuration cfg, const ProblemRules& rules, Rng& rng) {
  Grid g;
  for (auto& p : g.panels) p = empty_panel(cfg);
  for (int c = 0; c < component_count(cfg); ++c) {
    const ComponentRef ref{cfg, c};
    const auto& a = rules[static_cast<std::size_t>(c)];
    const auto layout = sample_grid_values(a[RuleSlot::NumberPosition], ref, rng);
    const auto type = sample_grid_values(a[RuleSlot::Type], ref, rng);
    const auto size = sample_grid_values(a[RuleSlot::Size], ref, rng);
    const auto color = sample_grid_values(a[RuleSlot::Color], ref, rng);
    const bool by_position = a[RuleSlot::NumberPosition].attribute == AttributeKind::Position;
    const auto boxes = component_slots(cfg, c);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t k = 0; k < 3; ++k) {
        const int v = layout[r][k];
        const SlotMask mask = by_position ? static_cast<SlotMask>(v)
                                          : random_mask_with_count(ref.slots(), v, rng);
        auto& cp = g.panels[3 * r + k].components[static_cast<std::size_t>(c)];
        for (std::size_t s = 0; s < cp.slots.size(); ++s) {
          if (!((mask >> s) & 1u)) continue;
          cp.slots[s] = Entity{boxes[s], type[r][k], size[r][k], color[r][k],
                               rng.below(domains::kAngleCount)};
        }
      }
    }
  }
  return g;
}

}  // namespace detail

/// Samples a problem whose oracle answer is unique. Rules are drawn once;
/// panel values and the answer set are redrawn until the oracle accepts or
/// the attempt budget runs out.
inline Problem generate_problem(Configuration cfg, RuleSet allowed, std::uint64_t seed,
                                std::string id = {},
                                int max_attempts = kDefaultAttemptBudget) {
  Rng rng(seed);
  Problem p;
  p.id = id.empty() ? std::string(to_name(cfg)) + "_s" + std::to_string(seed) : std::move(id);
  p.configuration = cfg;
  for (int c = 0; c < component_count(cfg); ++c) {
    p.assignments.push_back(sample_rule_assignment(cfg, c, allowed, rng));
  }
  p.rules_present = rules_in(p.assignments);

  std::vector<AttributeKind> targets;
  for (const auto& a : p.assignments) targets.push_back(a[RuleSlot::NumberPosition].attribute);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto grid = detail::build_grid(cfg, p.assignments, rng);
    auto answers = build_answer_set(grid.panels[8], cfg, targets, rng);
    const auto outcome = try_solve(std::span<const Panel>(grid.panels.data(), 8),
                                   answers.candidates, cfg);
    if (outcome.status != SolveStatus::Unique || outcome.choice != answers.correct_index) {
      continue;
    }
    std::move(grid.panels.begin(), grid.panels.begin() + 8, p.context.begin());
    p.answer_set = std::move(answers.candidates);
    p.correct_index = answers.correct_index;
    return p;
  }
  throw Error(Errc::GenerationExhausted, p.id + ": no oracle-unique problem in " +
                                             std::to_string(max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Datasets

struct DatasetSpec {
  std::map<Configuration, int> counts;
  RuleSet allowed = RuleSet::all();
  std::uint64_t master_seed = 0;
  int max_attempts = kDefaultAttemptBudget;
};

inline std::uint64_t problem_seed(std::uint64_t master, Configuration cfg, std::uint64_t index) {
  return hash_seed(master, static_cast<std::uint64_t>(cfg) + 1, index);
}

inline std::string problem_id(Configuration cfg, std::size_t index) {
  return std::string(to_name(cfg)) + "_" + std::to_string(index);
}

/// Problems in configuration order, then by index. Each problem's seed
/// depends only on (master_seed, configuration, index), so the output is the
/// same for any thread count.
inline std::vector<Problem> generate_dataset(const DatasetSpec& spec, unsigned threads = 1) {
  struct Job {
    Configuration cfg;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (auto cfg : kAllConfigurations) {
    const auto it = spec.counts.find(cfg);
    if (it == spec.counts.end()) continue;
    if (it->second < 0) throw Error(Errc::InvalidArgument, "negative problem count");
    for (int i = 0; i < it->second; ++i) jobs.push_back({cfg, static_cast<std::size_t>(i)});
  }

  std::vector<std::optional<Problem>> slots(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& job = jobs[j];
      const auto id = problem_id(job.cfg, job.index);
      try {
        slots[j] = generate_problem(job.cfg, spec.allowed,
                                    problem_seed(spec.master_seed, job.cfg, job.index), id,
                                    spec.max_attempts);
      } catch (const Error& e) {
        errors[j] = std::make_exception_ptr(
            Error(e.code(), e.what() + std::string(" [problem ") + id + "]"));
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || jobs.size() < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Problem> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace rpmforge
