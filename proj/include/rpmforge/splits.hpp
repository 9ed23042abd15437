#pragma once

// Rule-removal training sets and Same/Different test sets.

#include <charconv>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpmforge/core.hpp"

namespace rpmforge {

enum class SplitMode { TrainWithout, TestSame, TestDifferent };

inline constexpr std::string_view to_name(SplitMode m) noexcept {
  switch (m) {
    case SplitMode::TrainWithout: return "train_without";
    case SplitMode::TestSame: return "test_same";
    case SplitMode::TestDifferent: return "test_different";
  }
  return "unknown";
}

inline std::optional<SplitMode> split_mode_from_name(std::string_view s) {
  for (auto m : {SplitMode::TrainWithout, SplitMode::TestSame, SplitMode::TestDifferent}) {
    if (to_name(m) == s) return m;
  }
  return std::nullopt;
}

/// Index-based partition of each configuration's problems (60/20/20).
enum class Partition { Train, Val, Test, All };

inline constexpr std::string_view to_name(Partition p) noexcept {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Val: return "val";
    case Partition::Test: return "test";
    case Partition::All: return "all";
  }
  return "unknown";
}

inline std::optional<Partition> partition_from_name(std::string_view s) {
  for (auto p : {Partition::Train, Partition::Val, Partition::Test, Partition::All}) {
    if (to_name(p) == s) return p;
  }
  return std::nullopt;
}

inline Partition partition_of(std::size_t index, std::size_t count) {
  if (index * 10 < count * 6) return Partition::Train;
  if (index * 10 < count * 8) return Partition::Val;
  return Partition::Test;
}

/// Index parsed from a "{config}_{i}" id.
inline std::optional<std::size_t> index_from_id(std::string_view id) {
  const auto us = id.rfind('_');
  if (us == std::string_view::npos) return std::nullopt;
  std::size_t v = 0;
  const auto tail = id.substr(us + 1);
  const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), v);
  if (res.ec != std::errc() || res.ptr != tail.data() + tail.size()) return std::nullopt;
  return v;
}

/// Problems of `part`, judged by each id's index against the configuration's
/// generated count.
inline std::vector<Problem> select_partition(std::span<const Problem> problems, Partition part,
                                             const std::map<Configuration, std::size_t>& counts) {
  std::vector<Problem> out;
  for (const auto& p : problems) {
    if (part == Partition::All) {
      out.push_back(p);
      continue;
    }
    const auto idx = index_from_id(p.id);
    const auto it = counts.find(p.configuration);
    if (!idx || it == counts.end()) {
      throw Error(Errc::InvalidArgument, "cannot place '" + p.id + "' in a partition");
    }
    if (partition_of(*idx, it->second) == part) out.push_back(p);
  }
  return out;
}

inline bool keeps(const Problem& p, RuleSet omitted, SplitMode mode) {
  const RuleSet present = p.rules_present;
  switch (mode) {
    case SplitMode::TrainWithout:
    case SplitMode::TestSame:
      return (present & omitted).empty();
    case SplitMode::TestDifferent: {
      const RuleSet varying = present - RuleSet{RuleKind::Constant};
      return !(present & omitted).empty() && varying.is_subset_of(omitted);
    }
  }
  return false;
}

struct SplitResult {
  std::vector<Problem> problems;
  std::optional<std::string> warning;  // set when the filter keeps nothing
};

/// Order-preserving filter. Constant can never be omitted.
inline SplitResult filter_by_rules(std::span<const Problem> problems, RuleSet omitted,
                                   SplitMode mode) {
  if (omitted.contains(RuleKind::Constant)) {
    throw Error(Errc::InvalidArgument, "constant cannot be omitted");
  }
  if (omitted.empty()) throw Error(Errc::InvalidArgument, "no rule omitted");
  SplitResult out;
  for (const auto& p : problems) {
    if (keeps(p, omitted, mode)) out.problems.push_back(p);
  }
  if (out.problems.empty()) {
    out.warning = "empty_split: " + std::string(to_name(mode)) + " kept 0 of " +
                  std::to_string(problems.size()) + " problems";
  }
  return out;
}

}  // namespace rpmforge
