#pragma once

// Attribute Bisection Tree: eight candidates balanced on three attributes.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "rpmforge/core.hpp"
#include "rpmforge/rng.hpp"
#include "rpmforge/rule_engine.hpp"

namespace rpmforge {

/// One attribute of one component that a bisection level can vary. For the
/// layout slot, `attribute` is Number (change the count) or Position (move
/// entities, same count).
struct AbtUnit {
  int component = 0;
  RuleSlot slot = RuleSlot::Type;
  AttributeKind attribute = AttributeKind::Type;

  friend bool operator==(const AbtUnit&, const AbtUnit&) = default;
};

struct AnswerSet {
  std::array<Panel, kCandidates> candidates;
  int correct_index = 0;
  std::array<AbtUnit, 3> varied{};
};

namespace detail {

inline SlotMask random_mask_with_count(int n, int count, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(idx));
  SlotMask m = 0;
  for (int i = 0; i < count; ++i) m = static_cast<SlotMask>(m | (1u << idx[static_cast<std::size_t>(i)]));
  return m;
}

/// One level's modification, drawn once and applied to every "change" child.
struct LevelChange {
  AbtUnit unit;
  int new_value = 0;            // Type/Size/Color index
  SlotMask new_mask = 0;        // layout units
  std::vector<int> new_angles;  // angles for slots that gain an entity
};

inline void apply_change(Panel& p, const LevelChange& ch, Configuration cfg) {
  auto& cp = p.components[static_cast<std::size_t>(ch.unit.component)];
  if (ch.unit.slot != RuleSlot::NumberPosition) {
    for (auto& e : cp.slots) {
      if (!e) continue;
      switch (ch.unit.slot) {
        case RuleSlot::Type: e->type_idx = ch.new_value; break;
        case RuleSlot::Size: e->size_idx = ch.new_value; break;
        default: e->color_idx = ch.new_value; break;
      }
    }
    return;
  }
  // Relocate: new entities copy the component's (uniform) appearance.
  Entity proto;
  for (const auto& e : cp.slots) {
    if (e) {
      proto = *e;
      break;
    }
  }
  const auto boxes = component_slots(cfg, ch.unit.component);
  for (std::size_t s = 0; s < cp.slots.size(); ++s) {
    const bool want = (ch.new_mask >> s) & 1u;
    if (!want) {
      cp.slots[s].reset();
    } else if (!cp.slots[s]) {
      Entity e = proto;
      e.bbox = boxes[s];
      e.angle_idx = ch.new_angles[s];
      cp.slots[s] = e;
    }
  }
}

}  // namespace detail

/// Units of `correct` with at least two feasible values. `layout_targets`
/// gives, per component, whether the layout slot is governed by Number or
/// Position.
inline std::vector<AbtUnit> feasible_units(const Panel& correct, Configuration cfg,
                                           std::span<const AttributeKind> layout_targets) {
  std::vector<AbtUnit> out;
  for (int c = 0; c < component_count(cfg); ++c) {
    const auto& cp = correct.components.at(static_cast<std::size_t>(c));
    const int n = slot_count(cfg, c);
    if (n > 1) {
      const AttributeKind target = static_cast<std::size_t>(c) < layout_targets.size()
                                       ? layout_targets[static_cast<std::size_t>(c)]
                                       : AttributeKind::Number;
      const int count = cp.entity_count();
      const bool ok = target == AttributeKind::Number ? n >= 2 : (count >= 1 && count < n);
      if (ok) out.push_back({c, RuleSlot::NumberPosition, target});
    }
    for (auto [slot, attr] : {std::pair{RuleSlot::Type, AttributeKind::Type},
                              std::pair{RuleSlot::Size, AttributeKind::Size},
                              std::pair{RuleSlot::Color, AttributeKind::Color}}) {
      if (component_value(cp, attr)) out.push_back({c, slot, attr});
    }
  }
  return out;
}

/// Builds the impartial answer set around `correct`.
///
/// Three distinct units are drawn. Level l doubles the node list: every node
/// keeps its value on unit l in one child and takes the level's alternative
/// value in the other. The alternative is drawn once per level, so each
/// varied unit splits the eight leaves into two values, four apiece. The
/// leaves are shuffled; the all-keep leaf is the correct one.
inline AnswerSet build_answer_set(const Panel& correct, Configuration cfg,
                                  std::span<const AttributeKind> layout_targets, Rng& rng) {
  auto units = feasible_units(correct, cfg, layout_targets);
  if (units.size() < 3) {
    throw Error(Errc::AttributeExhausted,
                "only " + std::to_string(units.size()) + " attributes can vary on " +
                    std::string(to_name(cfg)));
  }
  rng.shuffle(std::span<AbtUnit>(units));

  AnswerSet out;
  std::vector<Panel> nodes{correct};
  for (std::size_t level = 0; level < 3; ++level) {
    detail::LevelChange ch;
    ch.unit = units[level];
    out.varied[level] = ch.unit;
    const ComponentRef ref{cfg, ch.unit.component};
    const auto& cp = correct.components[static_cast<std::size_t>(ch.unit.component)];
    const int n = ref.slots();

    if (ch.unit.slot == RuleSlot::NumberPosition) {
      const SlotMask cur = cp.occupancy();
      const int count = popcount(cur);
      if (ch.unit.attribute == AttributeKind::Number) {
        int k = rng.between(1, n - 1);
        if (k >= count) ++k;
        ch.new_mask = detail::random_mask_with_count(n, k, rng);
      } else {
        do {
          ch.new_mask = detail::random_mask_with_count(n, count, rng);
        } while (ch.new_mask == cur);
      }
      for (int s = 0; s < n; ++s) ch.new_angles.push_back(rng.below(domains::kAngleCount));
    } else {
      const int cur = *component_value(cp, ch.unit.attribute);
      const auto b = scalar_bounds(ch.unit.attribute, ref);
      int v = rng.between(b.lo, b.hi - 1);
      if (v >= cur) ++v;
      ch.new_value = v;
    }

    std::vector<Panel> next;
    next.reserve(nodes.size() * 2);
    for (const auto& node : nodes) {
      next.push_back(node);
      Panel changed = node;
      detail::apply_change(changed, ch, cfg);
      next.push_back(std::move(changed));
    }
    nodes = std::move(next);
  }

  std::array<int, kCandidates> order{};
  for (int i = 0; i < kCandidates; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(order));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.candidates[i] = std::move(nodes[static_cast<std::size_t>(order[i])]);
    if (order[i] == 0) out.correct_index = static_cast<int>(i);
  }
  return out;
}

/// Variant for callers without rule information: layout units change the
/// entity count.
inline AnswerSet build_answer_set(const Panel& correct, Configuration cfg, Rng& rng) {
  return build_answer_set(correct, cfg, std::span<const AttributeKind>{}, rng);
}

}  // namespace rpmforge
