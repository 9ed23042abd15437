#pragma once

// Domain types shared by every module: attribute/rule/configuration enums,
// the fixed value domains, slot geometry, and the Problem record.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpmforge/error.hpp"

namespace rpmforge {

enum class AttributeKind : std::uint8_t { Number, Position, Type, Size, Color, Angle };
enum class RuleKind : std::uint8_t { Constant, Progression, Arithmetic, DistributeThree };
enum class Configuration : std::uint8_t {
  Center,
  Grid2x2,
  Grid3x3,
  OutInCenter,
  OutInGrid,
  LeftRight,
  UpDown
};

/// The four rule carriers of a component. Number and Position share one.
enum class RuleSlot : std::uint8_t { NumberPosition, Type, Size, Color };

inline constexpr std::array kAllAttributes{
    AttributeKind::Number, AttributeKind::Position, AttributeKind::Type,
    AttributeKind::Size,   AttributeKind::Color,    AttributeKind::Angle};
inline constexpr std::array kAllRules{RuleKind::Constant, RuleKind::Progression,
                                      RuleKind::Arithmetic,
                                      RuleKind::DistributeThree};
inline constexpr std::array kAllConfigurations{
    Configuration::Center,    Configuration::Grid2x2,  Configuration::Grid3x3,
    Configuration::OutInCenter, Configuration::OutInGrid,
    Configuration::LeftRight, Configuration::UpDown};
inline constexpr std::array kAllRuleSlots{RuleSlot::NumberPosition, RuleSlot::Type,
                                          RuleSlot::Size, RuleSlot::Color};

inline constexpr bool is_governable(AttributeKind a) noexcept {
  return a != AttributeKind::Angle;
}

// ---------------------------------------------------------------------------
// Canonical names

namespace detail {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<AttributeKind> {
  static constexpr std::array<std::string_view, 6> names{
      "number", "position", "type", "size", "color", "angle"};
};
template <>
struct EnumNames<RuleKind> {
  static constexpr std::array<std::string_view, 4> names{
      "constant", "progression", "arithmetic", "distribute_three"};
};
template <>
struct EnumNames<Configuration> {
  static constexpr std::array<std::string_view, 7> names{
      "center", "grid_2x2", "grid_3x3", "o_ic", "o_ig", "l_r", "u_d"};
};
template <>
struct EnumNames<RuleSlot> {
  static constexpr std::array<std::string_view, 4> names{
      "number_position", "type", "size", "color"};
};

}  // namespace detail

template <typename E>
constexpr std::string_view to_name(E value) noexcept {
  return detail::EnumNames<E>::names[static_cast<std::size_t>(value)];
}

template <typename E>
constexpr std::optional<E> from_name(std::string_view name) noexcept {
  const auto& names = detail::EnumNames<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  return std::nullopt;
}

/// Column header used in report tables.
inline constexpr std::string_view display_label(Configuration cfg) noexcept {
  constexpr std::array<std::string_view, 7> labels{
      "Center", "2x2", "3x3", "O - IC", "O - IG", "L - R", "U - D"};
  return labels[static_cast<std::size_t>(cfg)];
}

// ---------------------------------------------------------------------------
// Value domains

namespace domains {

inline constexpr std::array<std::string_view, 6> kTypeNames{
    "none", "triangle", "square", "pentagon", "hexagon", "circle"};
inline constexpr std::array<double, 6> kSizeValues{0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
inline constexpr std::array<int, 10> kColorValues{255, 224, 196, 168, 140,
                                                  112, 84,  56,  28,  0};
inline constexpr std::array<int, 8> kAngleValues{-135, -90, -45, 0,
                                                 45,   90,  135, 180};

inline constexpr int kMinType = 1;  // index 0 ("none") marks an empty slot
inline constexpr int kMaxType = static_cast<int>(kTypeNames.size()) - 1;
inline constexpr int kSizeCount = static_cast<int>(kSizeValues.size());
inline constexpr int kColorCount = static_cast<int>(kColorValues.size());
inline constexpr int kAngleCount = static_cast<int>(kAngleValues.size());

}  // namespace domains

// ---------------------------------------------------------------------------
// Geometry

/// Axis-aligned box in unit coordinates: centre, width, height.
struct BBox {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;

  friend bool operator==(const BBox&, const BBox&) = default;

  double left() const noexcept { return cx - w / 2; }
  double right() const noexcept { return cx + w / 2; }
  double top() const noexcept { return cy - h / 2; }
  double bottom() const noexcept { return cy + h / 2; }

  bool contains(const BBox& other) const noexcept {
    constexpr double eps = 1e-9;
    return other.left() >= left() - eps && other.right() <= right() + eps &&
           other.top() >= top() - eps && other.bottom() <= bottom() + eps;
  }

  bool overlaps(const BBox& other) const noexcept {
    constexpr double eps = 1e-9;
    return left() < other.right() - eps && other.left() < right() - eps &&
           top() < other.bottom() - eps && other.top() < bottom() - eps;
  }
};

/// Occupied slots of one component, bit i set for slot i.
using SlotMask = std::uint16_t;

inline int popcount(SlotMask m) noexcept { return std::popcount(m); }

namespace detail {

inline constexpr std::array<BBox, 1> kWhole{{{0.5, 0.5, 1, 1}}};
inline constexpr std::array<BBox, 4> kGrid2{{{0.25, 0.25, 0.5, 0.5},
                                             {0.75, 0.25, 0.5, 0.5},
                                             {0.25, 0.75, 0.5, 0.5},
                                             {0.75, 0.75, 0.5, 0.5}}};
inline constexpr std::array<BBox, 9> kGrid3{{{0.17, 0.17, 0.33, 0.33},
                                             {0.5, 0.17, 0.33, 0.33},
                                             {0.83, 0.17, 0.33, 0.33},
                                             {0.17, 0.5, 0.33, 0.33},
                                             {0.5, 0.5, 0.33, 0.33},
                                             {0.83, 0.5, 0.33, 0.33},
                                             {0.17, 0.83, 0.33, 0.33},
                                             {0.5, 0.83, 0.33, 0.33},
                                             {0.83, 0.83, 0.33, 0.33}}};
inline constexpr std::array<BBox, 1> kInnerCenter{{{0.5, 0.5, 0.33, 0.33}}};
inline constexpr std::array<BBox, 4> kInnerGrid{{{0.42, 0.42, 0.15, 0.15},
                                                 {0.58, 0.42, 0.15, 0.15},
                                                 {0.42, 0.58, 0.15, 0.15},
                                                 {0.58, 0.58, 0.15, 0.15}}};
inline constexpr std::array<BBox, 1> kLeft{{{0.25, 0.5, 0.5, 1}}};
inline constexpr std::array<BBox, 1> kRight{{{0.75, 0.5, 0.5, 1}}};
inline constexpr std::array<BBox, 1> kUp{{{0.5, 0.25, 1, 0.5}}};
inline constexpr std::array<BBox, 1> kDown{{{0.5, 0.75, 1, 0.5}}};

}  // namespace detail

inline constexpr int component_count(Configuration cfg) noexcept {
  switch (cfg) {
    case Configuration::Center:
    case Configuration::Grid2x2:
    case Configuration::Grid3x3:
      return 1;
    default:
      return 2;
  }
}

/// Slot boxes of one component. Throws InvalidArgument for a bad component.
inline std::span<const BBox> component_slots(Configuration cfg, int component) {
  if (component < 0 || component >= component_count(cfg)) {
    throw Error(Errc::InvalidArgument,
                "component " + std::to_string(component) + " out of range for " +
                    std::string(to_name(cfg)));
  }
  using namespace detail;
  switch (cfg) {
    case Configuration::Center: return kWhole;
    case Configuration::Grid2x2: return kGrid2;
    case Configuration::Grid3x3: return kGrid3;
    case Configuration::OutInCenter:
      return component == 0 ? std::span<const BBox>(kWhole) : kInnerCenter;
    case Configuration::OutInGrid:
      return component == 0 ? std::span<const BBox>(kWhole) : kInnerGrid;
    case Configuration::LeftRight:
      return component == 0 ? std::span<const BBox>(kLeft) : kRight;
    case Configuration::UpDown:
      return component == 0 ? std::span<const BBox>(kUp) : kDown;
  }
  return {};
}

inline int slot_count(Configuration cfg, int component) {
  return static_cast<int>(component_slots(cfg, component).size());
}

inline int max_entities(Configuration cfg, int component) {
  return slot_count(cfg, component);
}

inline int total_slots(Configuration cfg) {
  int n = 0;
  for (int c = 0; c < component_count(cfg); ++c) n += slot_count(cfg, c);
  return n;
}

// ---------------------------------------------------------------------------
// Panels

struct Entity {
  BBox bbox;
  int type_idx = domains::kMinType;
  int size_idx = 0;
  int color_idx = 0;
  int angle_idx = 0;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// One component of a panel; index i holds the entity in slot i, if any.
struct ComponentPanel {
  std::vector<std::optional<Entity>> slots;

  SlotMask occupancy() const noexcept {
    SlotMask m = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i]) m = static_cast<SlotMask>(m | (1u << i));
    }
    return m;
  }
  int entity_count() const noexcept { return popcount(occupancy()); }

  friend bool operator==(const ComponentPanel&, const ComponentPanel&) = default;
};

struct Panel {
  std::vector<ComponentPanel> components;

  friend bool operator==(const Panel&, const Panel&) = default;
};

/// A panel with every component sized for `cfg` and no entities.
inline Panel empty_panel(Configuration cfg) {
  Panel p;
  p.components.resize(static_cast<std::size_t>(component_count(cfg)));
  for (int c = 0; c < component_count(cfg); ++c) {
    p.components[static_cast<std::size_t>(c)].slots.resize(
        static_cast<std::size_t>(slot_count(cfg, c)));
  }
  return p;
}

/// Equality on everything a rule can see (Angle ignored).
inline bool same_governed(const Panel& a, const Panel& b) {
  if (a.components.size() != b.components.size()) return false;
  for (std::size_t c = 0; c < a.components.size(); ++c) {
    const auto& x = a.components[c].slots;
    const auto& y = b.components[c].slots;
    if (x.size() != y.size()) return false;
    for (std::size_t s = 0; s < x.size(); ++s) {
      if (x[s].has_value() != y[s].has_value()) return false;
      if (!x[s]) continue;
      if (x[s]->type_idx != y[s]->type_idx || x[s]->size_idx != y[s]->size_idx ||
          x[s]->color_idx != y[s]->color_idx || !(x[s]->bbox == y[s]->bbox)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rules

/// One rule bound to one attribute.
///
/// `param` is the Progression delta (one of -2, -1, +1, +2) or the Arithmetic
/// sign (+1 addition, -1 subtraction); it is 0 for the other kinds.
/// DistributeThree also carries `triple`, rotated so its smallest value comes
/// first, and `permutation`: row r holds `triple` rotated left by
/// (permutation + r) mod 3.
struct RuleInstance {
  AttributeKind attribute = AttributeKind::Size;
  RuleKind kind = RuleKind::Constant;
  int param = 0;
  std::array<int, 3> triple{};
  int permutation = 0;

  friend bool operator==(const RuleInstance&, const RuleInstance&) = default;
};

/// Rules of one component, indexed by RuleSlot.
struct RuleAssignment {
  std::array<RuleInstance, 4> slots{
      RuleInstance{AttributeKind::Number}, RuleInstance{AttributeKind::Type},
      RuleInstance{AttributeKind::Size}, RuleInstance{AttributeKind::Color}};

  const RuleInstance& operator[](RuleSlot s) const {
    return slots[static_cast<std::size_t>(s)];
  }
  RuleInstance& operator[](RuleSlot s) { return slots[static_cast<std::size_t>(s)]; }

  friend bool operator==(const RuleAssignment&, const RuleAssignment&) = default;
};

/// Rules of a whole problem, one RuleAssignment per component.
using ProblemRules = std::vector<RuleAssignment>;

/// Small value set of rule kinds.
class RuleSet {
 public:
  constexpr RuleSet() = default;
  constexpr RuleSet(std::initializer_list<RuleKind> kinds) {
    for (auto k : kinds) insert(k);
  }

  static constexpr RuleSet all() { return RuleSet(kAllRules.begin(), kAllRules.end()); }

  constexpr void insert(RuleKind k) noexcept { bits_ |= bit(k); }
  constexpr void erase(RuleKind k) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(k)); }
  constexpr bool contains(RuleKind k) const noexcept { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept { return std::popcount(bits_); }

  constexpr RuleSet operator&(RuleSet o) const noexcept { return from_bits(bits_ & o.bits_); }
  constexpr RuleSet operator|(RuleSet o) const noexcept { return from_bits(bits_ | o.bits_); }
  constexpr RuleSet operator-(RuleSet o) const noexcept {
    return from_bits(bits_ & static_cast<std::uint8_t>(~o.bits_));
  }
  constexpr bool is_subset_of(RuleSet o) const noexcept { return (bits_ & ~o.bits_) == 0; }

  std::vector<RuleKind> kinds() const {
    std::vector<RuleKind> out;
    for (auto k : kAllRules) {
      if (contains(k)) out.push_back(k);
    }
    return out;
  }

  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  template <typename It>
  constexpr RuleSet(It first, It last) {
    for (; first != last; ++first) insert(*first);
  }
  static constexpr std::uint8_t bit(RuleKind k) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  static constexpr RuleSet from_bits(unsigned b) noexcept {
    RuleSet s;
    s.bits_ = static_cast<std::uint8_t>(b);
    return s;
  }

  std::uint8_t bits_ = 0;
};

inline RuleSet rules_in(const ProblemRules& rules) {
  RuleSet s;
  for (const auto& a : rules) {
    for (const auto& r : a.slots) s.insert(r.kind);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Problem

inline constexpr int kContextPanels = 8;
inline constexpr int kCandidates = 8;

struct Problem {
  std::string id;
  Configuration configuration = Configuration::Center;
  ProblemRules assignments;
  std::array<Panel, kContextPanels> context;    // row-major grid positions 0-7
  std::array<Panel, kCandidates> answer_set;
  int correct_index = 0;
  RuleSet rules_present;

  const Panel& correct_panel() const {
    return answer_set.at(static_cast<std::size_t>(correct_index));
  }

  friend bool operator==(const Problem&, const Problem&) = default;
};

}  // namespace rpmforge
