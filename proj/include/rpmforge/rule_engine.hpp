#pragma once

// Executable semantics of the four rules, row conformance, rule sampling and
// rule induction from a context.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpmforge/core.hpp"
#include "rpmforge/rng.hpp"

namespace rpmforge {

/// A component of a configuration; supplies the slot count for Number and
/// Position domains.
struct ComponentRef {
  Configuration cfg = Configuration::Center;
  int component = 0;

  int slots() const { return slot_count(cfg, component); }
};

/// Value of one attribute on one panel component. `value` is a domain index
/// for Type/Size/Color, an entity count for Number, and a SlotMask for
/// Position.
struct AttributeValue {
  AttributeKind attribute = AttributeKind::Size;
  int value = 0;

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;
};

using Row = std::array<int, 3>;

// ---------------------------------------------------------------------------
// Domains

struct ScalarBounds {
  int lo;
  int hi;
};

inline ScalarBounds scalar_bounds(AttributeKind attr, const ComponentRef& ref) {
  switch (attr) {
    case AttributeKind::Number: return {1, ref.slots()};
    case AttributeKind::Type: return {domains::kMinType, domains::kMaxType};
    case AttributeKind::Size: return {0, domains::kSizeCount - 1};
    case AttributeKind::Color: return {0, domains::kColorCount - 1};
    case AttributeKind::Angle: return {0, domains::kAngleCount - 1};
    case AttributeKind::Position: break;
  }
  return {1, (1 << ref.slots()) - 1};
}

inline bool in_domain(AttributeKind attr, int value, const ComponentRef& ref) {
  const auto b = scalar_bounds(attr, ref);
  return value >= b.lo && value <= b.hi;
}

/// Every legal value of `attr` on the component, ascending.
inline std::vector<int> domain_values(AttributeKind attr, const ComponentRef& ref) {
  const auto b = scalar_bounds(attr, ref);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(b.hi - b.lo + 1));
  for (int v = b.lo; v <= b.hi; ++v) out.push_back(v);
  return out;
}

/// Moves every occupied slot index by `delta` modulo `n`.
inline int shift_mask(int mask, int delta, int n) {
  int out = 0;
  for (int i = 0; i < n; ++i) {
    if (mask & (1 << i)) out |= 1 << (((i + delta) % n + n) % n);
  }
  return out;
}

inline Row rotate_left(const Row& r, int k) {
  k = ((k % 3) + 3) % 3;
  return {r[static_cast<std::size_t>(k)], r[static_cast<std::size_t>((k + 1) % 3)],
          r[static_cast<std::size_t>((k + 2) % 3)]};
}

// ---------------------------------------------------------------------------
// Applicability

struct RuleOption {
  RuleKind kind;
  std::vector<int> params;

  friend bool operator==(const RuleOption&, const RuleOption&) = default;
};

inline constexpr std::array<int, 4> kProgressionDeltas{-2, -1, 1, 2};
inline constexpr std::array<int, 2> kArithmeticSigns{1, -1};

/// Every (kind, params) pair whose semantics are satisfiable on the
/// component's domain for `attr`, in RuleKind order.
inline std::vector<RuleOption> enumerate_applicable_rules(AttributeKind attr,
                                                          const ComponentRef& ref) {
  if (!is_governable(attr)) {
    throw Error(Errc::InvalidArgument, "angle never carries a rule");
  }
  std::vector<RuleOption> out{{RuleKind::Constant, {0}}};
  const bool layout = attr == AttributeKind::Number || attr == AttributeKind::Position;
  const int n = ref.slots();
  if (layout && n == 1) return out;

  RuleOption prog{RuleKind::Progression, {}};
  for (int d : kProgressionDeltas) {
    bool ok;
    if (attr == AttributeKind::Position) {
      ok = d % n != 0;  // a full-cycle shift is indistinguishable from Constant
    } else {
      const auto b = scalar_bounds(attr, ref);
      ok = b.hi - b.lo >= 2 * std::abs(d);
    }
    if (ok) prog.params.push_back(d);
  }
  if (!prog.params.empty()) out.push_back(std::move(prog));

  if (attr != AttributeKind::Type) {
    RuleOption arith{RuleKind::Arithmetic, {}};
    for (int sign : kArithmeticSigns) {
      // Needs a pair whose result differs from the first operand; for
      // scalars that is lo + 1 <= hi under either sign.
      const auto b = scalar_bounds(attr, ref);
      const bool ok = attr == AttributeKind::Position ? n >= 2 : b.lo + 1 <= b.hi;
      if (ok) arith.params.push_back(sign);
    }
    if (!arith.params.empty()) out.push_back(std::move(arith));
  }

  if (domain_values(attr, ref).size() >= 3) {
    out.push_back({RuleKind::DistributeThree, {0}});
  }
  return out;
}

inline bool is_applicable(const RuleInstance& r, const ComponentRef& ref) {
  if (!is_governable(r.attribute)) return false;
  for (const auto& opt : enumerate_applicable_rules(r.attribute, ref)) {
    if (opt.kind != r.kind) continue;
    if (std::find(opt.params.begin(), opt.params.end(), r.param) == opt.params.end()) {
      return false;
    }
    if (r.kind != RuleKind::DistributeThree) return true;
    const auto& t = r.triple;
    if (r.permutation < 0 || r.permutation > 2) return false;
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
    if (t[0] > t[1] || t[0] > t[2]) return false;
    return std::all_of(t.begin(), t.end(),
                       [&](int v) { return in_domain(r.attribute, v, ref); });
  }
  return false;
}

// ---------------------------------------------------------------------------
// Application

enum class ApplyStatus { Ok, OutOfDomain, RuleViolated };

struct ApplyResult {
  ApplyStatus status = ApplyStatus::Ok;
  int value = 0;

  bool ok() const noexcept { return status == ApplyStatus::Ok; }
};

/// Third-column value implied by the first two columns. Non-throwing core of
/// apply_rule.
inline ApplyResult try_apply_rule(const RuleInstance& r, int v1, int v2,
                                  const ComponentRef& ref) {
  const AttributeKind a = r.attribute;
  if (!in_domain(a, v1, ref) || !in_domain(a, v2, ref)) {
    return {ApplyStatus::OutOfDomain, 0};
  }
  auto checked = [&](int v) -> ApplyResult {
    if (!in_domain(a, v, ref)) return {ApplyStatus::OutOfDomain, 0};
    return {ApplyStatus::Ok, v};
  };
  switch (r.kind) {
    case RuleKind::Constant:
      if (v1 != v2) return {ApplyStatus::RuleViolated, 0};
      return {ApplyStatus::Ok, v1};

    case RuleKind::Progression:
      if (a == AttributeKind::Position) {
        const int n = ref.slots();
        if (shift_mask(v1, r.param, n) != v2) return {ApplyStatus::RuleViolated, 0};
        return checked(shift_mask(v2, r.param, n));
      }
      if (v2 - v1 != r.param) return {ApplyStatus::RuleViolated, 0};
      return checked(v2 + r.param);

    case RuleKind::Arithmetic:
      if (a == AttributeKind::Position) {
        return checked(r.param > 0 ? (v1 | v2) : (v1 & ~v2));
      }
      return checked(r.param > 0 ? v1 + v2 : v1 - v2);

    case RuleKind::DistributeThree: {
      const auto& t = r.triple;
      const auto i = std::find(t.begin(), t.end(), v1) - t.begin();
      const auto j = std::find(t.begin(), t.end(), v2) - t.begin();
      if (i == 3 || j == 3 || (i + 1) % 3 != j) return {ApplyStatus::RuleViolated, 0};
      return {ApplyStatus::Ok, t[static_cast<std::size_t>((i + 2) % 3)]};
    }
  }
  return {ApplyStatus::RuleViolated, 0};
}

inline AttributeValue apply_rule(const RuleInstance& r, const AttributeValue& v1,
                                 const AttributeValue& v2, const ComponentRef& ref) {
  if (v1.attribute != r.attribute || v2.attribute != r.attribute) {
    throw Error(Errc::RuleViolated, "attribute mismatch for rule on " +
                                        std::string(to_name(r.attribute)));
  }
  const auto res = try_apply_rule(r, v1.value, v2.value, ref);
  switch (res.status) {
    case ApplyStatus::Ok: return {r.attribute, res.value};
    case ApplyStatus::OutOfDomain:
      throw Error(Errc::OutOfDomain, std::string(to_name(r.kind)) + " on " +
                                         std::string(to_name(r.attribute)) +
                                         " leaves the value domain");
    case ApplyStatus::RuleViolated: break;
  }
  throw Error(Errc::RuleViolated, "(" + std::to_string(v1.value) + ", " +
                                      std::to_string(v2.value) + ") inconsistent with " +
                                      std::string(to_name(r.kind)));
}

/// True iff the row is the completion apply_rule gives. DistributeThree rows
/// must also be one of the triple's cyclic rotations.
inline bool row_conforms(const RuleInstance& r, const Row& row, const ComponentRef& ref) {
  const auto res = try_apply_rule(r, row[0], row[1], ref);
  return res.ok() && res.value == row[2];
}

/// Row-aware conformance: a DistributeThree row must be exactly the rotation
/// the instance assigns to `row_index`.
inline bool row_conforms_at(const RuleInstance& r, const Row& row, int row_index,
                            const ComponentRef& ref) {
  if (r.kind == RuleKind::DistributeThree) {
    return row == rotate_left(r.triple, r.permutation + row_index) &&
           std::all_of(row.begin(), row.end(),
                       [&](int v) { return in_domain(r.attribute, v, ref); });
  }
  return row_conforms(r, row, ref);
}

/// DistributeThree instance whose row 0 is `row0`, in canonical form.
inline std::optional<RuleInstance> distribute_three_from_row(AttributeKind attr,
                                                             const Row& row0) {
  if (row0[0] == row0[1] || row0[1] == row0[2] || row0[0] == row0[2]) return std::nullopt;
  const auto k = static_cast<int>(std::min_element(row0.begin(), row0.end()) - row0.begin());
  RuleInstance r{attr, RuleKind::DistributeThree, 0};
  r.triple = rotate_left(row0, k);
  r.permutation = (3 - k) % 3;
  return r;
}

// ---------------------------------------------------------------------------
// Extraction

/// Value of `attr` on a panel component; nullopt when the component is empty
/// or its entities disagree on a Type/Size/Color value.
inline std::optional<int> component_value(const ComponentPanel& cp, AttributeKind attr) {
  const SlotMask occ = cp.occupancy();
  if (occ == 0) return std::nullopt;
  switch (attr) {
    case AttributeKind::Number: return popcount(occ);
    case AttributeKind::Position: return static_cast<int>(occ);
    default: break;
  }
  std::optional<int> v;
  for (const auto& e : cp.slots) {
    if (!e) continue;
    int x = 0;
    switch (attr) {
      case AttributeKind::Type: x = e->type_idx; break;
      case AttributeKind::Size: x = e->size_idx; break;
      case AttributeKind::Color: x = e->color_idx; break;
      default: x = e->angle_idx; break;
    }
    if (v && *v != x) return std::nullopt;
    v = x;
  }
  return v;
}

inline std::optional<AttributeValue> attribute_value(const Panel& p, int component,
                                                     AttributeKind attr) {
  const auto v = component_value(p.components.at(static_cast<std::size_t>(component)), attr);
  if (!v) return std::nullopt;
  return AttributeValue{attr, *v};
}

// ---------------------------------------------------------------------------
// Sampling

inline RuleInstance sample_distribute_three(AttributeKind attr, const ComponentRef& ref,
                                            Rng& rng) {
  auto values = domain_values(attr, ref);
  Row row0{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(static_cast<int>(values.size() - i)));
    std::swap(values[i], values[j]);
    row0[i] = values[i];
  }
  return *distribute_three_from_row(attr, row0);
}

inline RuleInstance sample_slot_rule(AttributeKind attr, const ComponentRef& ref,
                                     RuleSet allowed, Rng& rng) {
  const auto options = enumerate_applicable_rules(attr, ref);
  std::vector<const RuleOption*> usable;
  for (const auto& o : options) {
    if (allowed.contains(o.kind)) usable.push_back(&o);
  }
  if (usable.empty()) {
    if (options.size() == 1) return RuleInstance{attr, RuleKind::Constant, 0};
    throw Error(Errc::Unsatisfiable, "no allowed rule applies to " +
                                         std::string(to_name(attr)) + " on " +
                                         std::string(to_name(ref.cfg)) + " component " +
                                         std::to_string(ref.component));
  }
  const RuleOption& opt = *usable[static_cast<std::size_t>(rng.below(static_cast<int>(usable.size())))];
  if (opt.kind == RuleKind::DistributeThree) return sample_distribute_three(attr, ref, rng);
  const int param = opt.params[static_cast<std::size_t>(rng.below(static_cast<int>(opt.params.size())))];
  return RuleInstance{attr, opt.kind, param};
}

/// Draws one rule per slot: the kind uniformly among applicable allowed
/// kinds, then its parameter uniformly. Geometry-forced slots fall back to
/// Constant.
inline RuleAssignment sample_rule_assignment(Configuration cfg, int component,
                                             RuleSet allowed, Rng& rng) {
  if (allowed.empty()) throw Error(Errc::Unsatisfiable, "empty allowed rule set");
  const ComponentRef ref{cfg, component};
  RuleAssignment a;
  const AttributeKind layout_target =
      ref.slots() == 1 ? AttributeKind::Number
                       : (rng.coin() ? AttributeKind::Position : AttributeKind::Number);
  a[RuleSlot::NumberPosition] = sample_slot_rule(layout_target, ref, allowed, rng);
  a[RuleSlot::Type] = sample_slot_rule(AttributeKind::Type, ref, allowed, rng);
  a[RuleSlot::Size] = sample_slot_rule(AttributeKind::Size, ref, allowed, rng);
  a[RuleSlot::Color] = sample_slot_rule(AttributeKind::Color, ref, allowed, rng);
  return a;
}

// ---------------------------------------------------------------------------
// Induction

/// Per component, per RuleSlot: every rule instance consistent with rows 1
/// and 2 of a context.
using SlotHypotheses = std::vector<std::array<std::vector<RuleInstance>, 4>>;

namespace detail {

inline void collect_hypotheses(std::span<const Panel> context, const ComponentRef& ref,
                               AttributeKind attr, std::vector<RuleInstance>& out) {
  std::array<Row, 2> rows{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      const auto v = component_value(
          context[static_cast<std::size_t>(3 * r + c)].components.at(
              static_cast<std::size_t>(ref.component)),
          attr);
      if (!v) return;
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = *v;
    }
  }
  auto consider = [&](const RuleInstance& inst) {
    if (row_conforms_at(inst, rows[0], 0, ref) && row_conforms_at(inst, rows[1], 1, ref)) {
      out.push_back(inst);
    }
  };
  for (const auto& opt : enumerate_applicable_rules(attr, ref)) {
    if (opt.kind == RuleKind::DistributeThree) {
      if (auto inst = distribute_three_from_row(attr, rows[0])) consider(*inst);
      continue;
    }
    for (int p : opt.params) consider(RuleInstance{attr, opt.kind, p});
  }
}

}  // namespace detail

inline SlotHypotheses induce_slot_hypotheses(std::span<const Panel> context,
                                             Configuration cfg) {
  if (context.size() < 6) {
    throw Error(Errc::InvalidArgument, "context needs at least two full rows");
  }
  SlotHypotheses out(static_cast<std::size_t>(component_count(cfg)));
  for (int c = 0; c < component_count(cfg); ++c) {
    const ComponentRef ref{cfg, c};
    auto& slots = out[static_cast<std::size_t>(c)];
    if (ref.slots() > 1) {
      detail::collect_hypotheses(context, ref, AttributeKind::Position, slots[0]);
    }
    detail::collect_hypotheses(context, ref, AttributeKind::Number, slots[0]);
    detail::collect_hypotheses(context, ref, AttributeKind::Type, slots[1]);
    detail::collect_hypotheses(context, ref, AttributeKind::Size, slots[2]);
    detail::collect_hypotheses(context, ref, AttributeKind::Color, slots[3]);
  }
  return out;
}

/// Every full assignment whose rules hold on rows 1 and 2, enumerated
/// slot-major in RuleKind order. Throws NoConsistentRule when a slot has no
/// candidate.
inline std::vector<ProblemRules> induce_rules(std::span<const Panel> context,
                                              Configuration cfg) {
  const auto hyps = induce_slot_hypotheses(context, cfg);
  for (std::size_t c = 0; c < hyps.size(); ++c) {
    for (std::size_t s = 0; s < 4; ++s) {
      if (hyps[c][s].empty()) {
        throw Error(Errc::NoConsistentRule,
                    "no rule explains slot " + std::string(to_name(kAllRuleSlots[s])) +
                        " of component " + std::to_string(c));
      }
    }
  }
  std::vector<ProblemRules> out{ProblemRules(hyps.size())};
  for (std::size_t c = 0; c < hyps.size(); ++c) {
    for (std::size_t s = 0; s < 4; ++s) {
      std::vector<ProblemRules> next;
      next.reserve(out.size() * hyps[c][s].size());
      for (const auto& partial : out) {
        for (const auto& inst : hyps[c][s]) {
          next.push_back(partial);
          next.back()[c].slots[s] = inst;
        }
      }
      out = std::move(next);
    }
  }
  return out;
}

}  // namespace rpmforge
