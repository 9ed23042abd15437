#pragma once

// Rule-induction oracle and context-blind answer-set auditor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpmforge/core.hpp"
#include "rpmforge/rule_engine.hpp"

namespace rpmforge {

enum class SolveStatus { Unique, Ambiguous, NoSolution };

struct SolveOutcome {
  SolveStatus status = SolveStatus::NoSolution;
  int choice = -1;                       // admissible candidate when Unique
  std::size_t consistent_assignments = 0;  // |induce_rules(context)|
  std::vector<bool> admissible;
};

namespace detail {

/// Hypotheses the third row is checked against. On the shared Number/Position
/// slot a consistent Position rule also fixes the count, so when one exists
/// the weaker Number hypotheses are dropped.
inline std::vector<RuleInstance> effective_hypotheses(const std::vector<RuleInstance>& hyps,
                                                      RuleSlot slot) {
  if (slot != RuleSlot::NumberPosition) return hyps;
  std::vector<RuleInstance> pos;
  for (const auto& h : hyps) {
    if (h.attribute == AttributeKind::Position) pos.push_back(h);
  }
  return pos.empty() ? hyps : pos;
}

inline bool completes_row(const RuleInstance& h, const Panel& left, const Panel& mid,
                          const Panel& cand, int component, const ComponentRef& ref) {
  const auto c = static_cast<std::size_t>(component);
  if (cand.components.size() <= c) return false;
  const auto a = component_value(left.components[c], h.attribute);
  const auto b = component_value(mid.components[c], h.attribute);
  const auto x = component_value(cand.components[c], h.attribute);
  if (!a || !b || !x) return false;
  return row_conforms_at(h, Row{*a, *b, *x}, 2, ref);
}

}  // namespace detail

/// Non-throwing oracle over a context (8 panels) and a candidate list.
inline SolveOutcome try_solve(std::span<const Panel> context,
                              std::span<const Panel> candidates, Configuration cfg) {
  SolveOutcome out;
  out.admissible.assign(candidates.size(), false);
  if (context.size() != kContextPanels) return out;

  const auto hyps = induce_slot_hypotheses(context, cfg);
  std::size_t product = 1;
  std::vector<std::array<std::vector<RuleInstance>, 4>> effective(hyps.size());
  for (std::size_t c = 0; c < hyps.size(); ++c) {
    for (std::size_t s = 0; s < 4; ++s) {
      product *= hyps[c][s].size();
      effective[c][s] = detail::effective_hypotheses(hyps[c][s], kAllRuleSlots[s]);
    }
  }
  out.consistent_assignments = product;
  if (product == 0) return out;

  int count = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool ok = true;
    for (std::size_t c = 0; c < effective.size() && ok; ++c) {
      const ComponentRef ref{cfg, static_cast<int>(c)};
      for (std::size_t s = 0; s < 4 && ok; ++s) {
        bool any = false;
        for (const auto& h : effective[c][s]) {
          if (detail::completes_row(h, context[6], context[7], candidates[i],
                                    static_cast<int>(c), ref)) {
            any = true;
            break;
          }
        }
        ok = any;
      }
    }
    out.admissible[i] = ok;
    if (ok) {
      ++count;
      out.choice = static_cast<int>(i);
    }
  }
  if (count == 1) {
    out.status = SolveStatus::Unique;
  } else {
    out.status = count == 0 ? SolveStatus::NoSolution : SolveStatus::Ambiguous;
    out.choice = -1;
  }
  return out;
}

inline SolveOutcome try_solve(const Problem& p) {
  return try_solve(p.context, p.answer_set, p.configuration);
}

struct SolveResult {
  int choice = -1;
  std::size_t consistent_assignments = 0;
};

/// Oracle answer. Throws Ambiguous when several candidates complete the
/// third row and NoSolution when none does.
inline SolveResult solve(const Problem& p) {
  const auto o = try_solve(p);
  switch (o.status) {
    case SolveStatus::Unique: return {o.choice, o.consistent_assignments};
    case SolveStatus::Ambiguous: {
      std::string which;
      for (std::size_t i = 0; i < o.admissible.size(); ++i) {
        if (o.admissible[i]) which += (which.empty() ? "" : ",") + std::to_string(i);
      }
      throw Error(Errc::Ambiguous, p.id + ": candidates " + which + " are all admissible");
    }
    case SolveStatus::NoSolution: break;
  }
  throw Error(Errc::NoSolution, p.id + ": no candidate completes the third row");
}

// ---------------------------------------------------------------------------
// Context-blind audit

enum class Heuristic { MajorityVote, Centroid, UniformRandom };

inline constexpr std::string_view to_name(Heuristic h) noexcept {
  switch (h) {
    case Heuristic::MajorityVote: return "majority_vote";
    case Heuristic::Centroid: return "centroid";
    case Heuristic::UniformRandom: return "uniform_random";
  }
  return "unknown";
}

/// Answer-set-only description of a candidate: per component the entity
/// count, one occupancy bit per slot, and the mean Type/Size/Color index.
inline std::vector<double> candidate_features(const Panel& p) {
  std::vector<double> f;
  for (const auto& cp : p.components) {
    const SlotMask occ = cp.occupancy();
    f.push_back(popcount(occ));
    for (std::size_t s = 0; s < cp.slots.size(); ++s) f.push_back((occ >> s) & 1u);
    double t = 0, sz = 0, col = 0;
    for (const auto& e : cp.slots) {
      if (!e) continue;
      t += e->type_idx;
      sz += e->size_idx;
      col += e->color_idx;
    }
    const double n = std::max(1, popcount(occ));
    f.push_back(t / n);
    f.push_back(sz / n);
    f.push_back(col / n);
  }
  return f;
}

/// Candidate whose feature values are shared by the most other candidates.
/// Ties go to the lowest index.
inline int pick_majority_vote(std::span<const Panel> candidates) {
  std::vector<std::vector<double>> feats;
  for (const auto& c : candidates) feats.push_back(candidate_features(c));
  int best = 0;
  long best_score = -1;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    long score = 0;
    for (std::size_t k = 0; k < feats[i].size(); ++k) {
      for (std::size_t j = 0; j < feats.size(); ++j) {
        if (k < feats[j].size() && feats[j][k] == feats[i][k]) ++score;
      }
    }
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Candidate nearest (L1 over feature indices) to the answer-set centroid.
inline int pick_centroid(std::span<const Panel> candidates) {
  std::vector<std::vector<double>> feats;
  std::size_t width = 0;
  for (const auto& c : candidates) {
    feats.push_back(candidate_features(c));
    width = std::max(width, feats.back().size());
  }
  for (auto& f : feats) f.resize(width, 0.0);
  std::vector<double> mean(width, 0.0);
  for (const auto& f : feats) {
    for (std::size_t k = 0; k < width; ++k) mean[k] += f[k];
  }
  for (auto& m : mean) m /= static_cast<double>(feats.size());
  int best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    double d = 0;
    for (std::size_t k = 0; k < width; ++k) d += std::abs(feats[i][k] - mean[k]);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

struct HeuristicResult {
  Heuristic heuristic;
  std::size_t hits = 0;
  double hit_rate = 0;
};

struct AuditReport {
  std::size_t problems = 0;
  std::vector<HeuristicResult> results;
};

/// Fraction of problems where each answer-set-only heuristic picks the
/// correct candidate. UniformRandom is reported analytically as 1/8.
inline AuditReport audit_context_blind(std::span<const Problem> problems,
                                       std::span<const Heuristic> heuristics) {
  if (problems.empty()) {
    throw Error(Errc::InvalidArgument, "audit needs at least one problem");
  }
  AuditReport rep;
  rep.problems = problems.size();
  for (Heuristic h : heuristics) {
    HeuristicResult r{h};
    if (h == Heuristic::UniformRandom) {
      r.hit_rate = 1.0 / kCandidates;
      rep.results.push_back(r);
      continue;
    }
    for (const auto& p : problems) {
      const int pick = h == Heuristic::MajorityVote ? pick_majority_vote(p.answer_set)
                                                    : pick_centroid(p.answer_set);
      if (pick == p.correct_index) ++r.hits;
    }
    r.hit_rate = static_cast<double>(r.hits) / static_cast<double>(problems.size());
    rep.results.push_back(r);
  }
  return rep;
}

inline AuditReport audit_context_blind(std::span<const Problem> problems) {
  constexpr std::array all{Heuristic::MajorityVote, Heuristic::Centroid,
                           Heuristic::UniformRandom};
  return audit_context_blind(problems, all);
}

}  // namespace rpmforge
