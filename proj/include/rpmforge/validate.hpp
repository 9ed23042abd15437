#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpmforge/core.hpp"
#include "rpmforge/rule_engine.hpp"
#include "rpmforge/solver.hpp"

namespace rpmforge {

/// One broken Problem invariant. `row` is 0-based; messages print it 1-based.
struct Violation {
  std::string subject;  // e.g. "answer_set[3]", "assignments[1]", "rules_present"
  std::optional<int> row;
  std::optional<AttributeKind> attribute;
  std::string message;
};

namespace detail {

inline void check_panel(const Panel& p, Configuration cfg, const std::string& name,
                        std::vector<Violation>& out) {
  if (static_cast<int>(p.components.size()) != component_count(cfg)) {
    out.push_back({name, {}, {}, "wrong component count"});
    return;
  }
  for (int c = 0; c < component_count(cfg); ++c) {
    const auto& cp = p.components[static_cast<std::size_t>(c)];
    const auto boxes = component_slots(cfg, c);
    const std::string where = name + " component " + std::to_string(c);
    if (cp.slots.size() != boxes.size()) {
      out.push_back({where, {}, {}, "wrong slot count"});
      continue;
    }
    if (cp.occupancy() == 0) out.push_back({where, {}, AttributeKind::Number, "no entities"});
    for (std::size_t s = 0; s < cp.slots.size(); ++s) {
      if (!cp.slots[s]) continue;
      const Entity& e = *cp.slots[s];
      const std::string at = where + " slot " + std::to_string(s);
      if (!boxes[s].contains(e.bbox)) out.push_back({at, {}, {}, "bbox outside its slot"});
      if (e.type_idx < domains::kMinType || e.type_idx > domains::kMaxType)
        out.push_back({at, {}, AttributeKind::Type, "type index out of domain"});
      if (e.size_idx < 0 || e.size_idx >= domains::kSizeCount)
        out.push_back({at, {}, AttributeKind::Size, "size index out of domain"});
      if (e.color_idx < 0 || e.color_idx >= domains::kColorCount)
        out.push_back({at, {}, AttributeKind::Color, "color index out of domain"});
      if (e.angle_idx < 0 || e.angle_idx >= domains::kAngleCount)
        out.push_back({at, {}, AttributeKind::Angle, "angle index out of domain"});
    }
  }
}

}  // namespace detail

/// Every broken Problem invariant; empty iff the problem is well formed.
/// The oracle check runs only when everything else holds, so a single
/// perturbation reports a single violation.
inline std::vector<Violation> validate_problem(const Problem& p) {
  std::vector<Violation> out;
  const Configuration cfg = p.configuration;

  for (int i = 0; i < kContextPanels; ++i) {
    detail::check_panel(p.context[static_cast<std::size_t>(i)], cfg,
                        "context[" + std::to_string(i) + "]", out);
  }
  for (int i = 0; i < kCandidates; ++i) {
    detail::check_panel(p.answer_set[static_cast<std::size_t>(i)], cfg,
                        "answer_set[" + std::to_string(i) + "]", out);
  }
  if (p.correct_index < 0 || p.correct_index >= kCandidates) {
    out.push_back({"correct_index", {}, {}, "outside [0, 7]"});
  }
  if (static_cast<int>(p.assignments.size()) != component_count(cfg)) {
    out.push_back({"assignments", {}, {}, "one assignment per component required"});
  }
  if (!out.empty()) return out;

  for (int i = 0; i < kCandidates; ++i) {
    for (int j = i + 1; j < kCandidates; ++j) {
      if (same_governed(p.answer_set[static_cast<std::size_t>(i)],
                        p.answer_set[static_cast<std::size_t>(j)])) {
        out.push_back({"answer_set", {}, {},
                       "candidates " + std::to_string(i) + " and " + std::to_string(j) +
                           " are not distinct"});
      }
    }
  }

  if (rules_in(p.assignments) != p.rules_present) {
    out.push_back({"rules_present", {}, {}, "does not match the assignments"});
  }

  const Panel* grid[9];
  for (int i = 0; i < 8; ++i) grid[i] = &p.context[static_cast<std::size_t>(i)];
  grid[8] = &p.correct_panel();

  for (int c = 0; c < component_count(cfg); ++c) {
    const ComponentRef ref{cfg, c};
    const auto& a = p.assignments[static_cast<std::size_t>(c)];
    const std::string subject = "assignments[" + std::to_string(c) + "]";
    for (std::size_t s = 0; s < 4; ++s) {
      const RuleInstance& r = a.slots[s];
      const RuleSlot slot = kAllRuleSlots[s];
      const bool attr_ok = slot == RuleSlot::NumberPosition
                               ? (r.attribute == AttributeKind::Number ||
                                  r.attribute == AttributeKind::Position)
                               : r.attribute == AttributeKind(static_cast<int>(s) + 1);
      if (!attr_ok || !is_applicable(r, ref) ||
          (slot == RuleSlot::NumberPosition && ref.slots() == 1 &&
           r.kind != RuleKind::Constant)) {
        out.push_back({subject, {}, r.attribute,
                       std::string(to_name(slot)) + " rule is not applicable"});
        continue;
      }
      for (int row = 0; row < 3; ++row) {
        Row vals{};
        bool have = true;
        for (int k = 0; k < 3; ++k) {
          const auto v = component_value(grid[3 * row + k]->components[static_cast<std::size_t>(c)],
                                         r.attribute);
          if (!v) {
            have = false;
            break;
          }
          vals[static_cast<std::size_t>(k)] = *v;
        }
        if (!have || !row_conforms_at(r, vals, row, ref)) {
          out.push_back({subject + " component " + std::to_string(c), row, r.attribute,
                         std::string(to_name(r.attribute)) + " row " + std::to_string(row + 1) +
                             " does not follow " + std::string(to_name(r.kind))});
        }
      }
    }
  }
  if (!out.empty()) return out;

  const auto o = try_solve(p);
  if (o.status != SolveStatus::Unique) {
    out.push_back({"oracle", {}, {},
                   o.status == SolveStatus::Ambiguous ? "several candidates are admissible"
                                                      : "no candidate is admissible"});
  } else if (o.choice != p.correct_index) {
    out.push_back({"oracle", {}, {}, "oracle picks " + std::to_string(o.choice)});
  }
  return out;
}

}  // namespace rpmforge
