#pragma once

// Token format for entities, panels and problems; JSONL dataset, prediction
// and corpus files.
//
// Entity:  [cx, cy, w, h], type, size, color, angle   (indices, not values)
// Panel:   one entry per slot, component-major, separated by ";"; an empty
//          slot is "none"
// Source:  the eight context panels separated by "|"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "rpmforge/core.hpp"

namespace rpmforge {

using TokenSequence = std::vector<std::string>;
using Json = nlohmann::ordered_json;

/// Problems plus the metadata record stored on line 0 of a dataset file.
struct Dataset {
  Json meta = Json::object();
  std::vector<Problem> problems;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct PredictionRecord {
  std::string id;
  TokenSequence tokens;
};

// ---------------------------------------------------------------------------
// Tokens

inline bool is_punct(char c) noexcept {
  return c == '[' || c == ']' || c == ',' || c == ';' || c == '|';
}

inline TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (is_punct(c)) {
      out.emplace_back(1, c);
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && !is_punct(text[i]) && text[i] != ' ' && text[i] != '\t' &&
             text[i] != '\n' && text[i] != '\r') {
        ++i;
      }
      out.emplace_back(text.substr(start, i - start));
    }
  }
  return out;
}

/// Joins tokens the way the format is written: no space after "[" or before
/// "]", ",", ";"; a single space everywhere else.
inline std::string render(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (i > 0 && tokens[i - 1] != "[" && t != "]" && t != "," && t != ";") out += ' ';
    out += t;
  }
  return out;
}

/// Shortest decimal that reads back to the same double ("1", "0.5").
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Serialization

inline void append_entity(const Entity& e, TokenSequence& out) {
  out.insert(out.end(), {"[", format_number(e.bbox.cx), ",", format_number(e.bbox.cy), ",",
                         format_number(e.bbox.w), ",", format_number(e.bbox.h), "]", ",",
                         std::to_string(e.type_idx), ",", std::to_string(e.size_idx), ",",
                         std::to_string(e.color_idx), ",", std::to_string(e.angle_idx)});
}

inline TokenSequence serialize_entity(const Entity& e) {
  TokenSequence out;
  append_entity(e, out);
  return out;
}

inline void append_panel(const Panel& p, TokenSequence& out) {
  bool first = true;
  for (const auto& cp : p.components) {
    for (const auto& slot : cp.slots) {
      if (!first) out.emplace_back(";");
      first = false;
      if (slot) {
        append_entity(*slot, out);
      } else {
        out.emplace_back("none");
      }
    }
  }
}

inline TokenSequence serialize_panel(const Panel& p) {
  TokenSequence out;
  append_panel(p, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class TokenCursor {
 public:
  explicit TokenCursor(const TokenSequence& t) : tokens_(t) {}

  bool done() const noexcept { return pos_ >= tokens_.size(); }
  std::size_t position() const noexcept { return pos_; }
  const std::string& peek() const {
    static const std::string end = "<end>";
    return done() ? end : tokens_[pos_];
  }

  void expect(std::string_view tok) {
    if (peek() != tok) throw ParseError(pos_, "'" + std::string(tok) + "'", peek());
    ++pos_;
  }

  double number() {
    const auto& t = peek();
    double v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (done() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      throw ParseError(pos_, "a decimal number", t);
    }
    ++pos_;
    return v;
  }

  /// Integer index checked against [0, limit).
  int index(std::string_view what, int limit) {
    const auto& t = peek();
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (done() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      throw ParseError(pos_, "an integer " + std::string(what) + " index", t);
    }
    if (v < 0 || v >= limit) {
      throw Error(Errc::DomainError, "token " + std::to_string(pos_) + ": " +
                                         std::string(what) + " index " + t +
                                         " outside [0, " + std::to_string(limit) + ")");
    }
    ++pos_;
    return v;
  }

 private:
  const TokenSequence& tokens_;
  std::size_t pos_ = 0;
};

inline Entity parse_entity_at(TokenCursor& cur) {
  Entity e;
  cur.expect("[");
  e.bbox.cx = cur.number();
  cur.expect(",");
  e.bbox.cy = cur.number();
  cur.expect(",");
  e.bbox.w = cur.number();
  cur.expect(",");
  e.bbox.h = cur.number();
  cur.expect("]");
  cur.expect(",");
  const std::size_t type_pos = cur.position();
  e.type_idx = cur.index("type", static_cast<int>(domains::kTypeNames.size()));
  if (e.type_idx == 0) {
    throw Error(Errc::DomainError, "token " + std::to_string(type_pos) +
                                       ": type 0 (\"none\") cannot be a placed entity");
  }
  cur.expect(",");
  e.size_idx = cur.index("size", domains::kSizeCount);
  cur.expect(",");
  e.color_idx = cur.index("color", domains::kColorCount);
  cur.expect(",");
  e.angle_idx = cur.index("angle", domains::kAngleCount);
  return e;
}

inline void expect_end(const TokenCursor& cur) {
  if (!cur.done()) throw ParseError(cur.position(), "end of input", cur.peek());
}

}  // namespace detail

inline Entity parse_entity(const TokenSequence& tokens) {
  detail::TokenCursor cur(tokens);
  auto e = detail::parse_entity_at(cur);
  detail::expect_end(cur);
  return e;
}

inline Panel parse_panel(const TokenSequence& tokens, Configuration cfg) {
  detail::TokenCursor cur(tokens);
  Panel p = empty_panel(cfg);
  bool first = true;
  for (int c = 0; c < component_count(cfg); ++c) {
    const auto boxes = component_slots(cfg, c);
    auto& cp = p.components[static_cast<std::size_t>(c)];
    for (std::size_t s = 0; s < boxes.size(); ++s) {
      if (!first) cur.expect(";");
      first = false;
      if (cur.peek() == "none") {
        cur.expect("none");
        continue;
      }
      const std::size_t at = cur.position();
      if (cur.peek() != "[") throw ParseError(at, "'none' or '['", cur.peek());
      Entity e = detail::parse_entity_at(cur);
      if (!boxes[s].contains(e.bbox)) {
        throw Error(Errc::DomainError, "token " + std::to_string(at) + ": bbox outside slot " +
                                           std::to_string(s) + " of component " +
                                           std::to_string(c));
      }
      cp.slots[s] = e;
    }
    if (cp.occupancy() == 0) {
      throw Error(Errc::DomainError, "component " + std::to_string(c) + " has no entities");
    }
  }
  detail::expect_end(cur);
  return p;
}

inline Panel parse_panel(std::string_view text, Configuration cfg) {
  return parse_panel(tokenize(text), cfg);
}

struct SerializedProblem {
  TokenSequence source;
  TokenSequence target;
  std::array<TokenSequence, kCandidates> choices;
};

inline SerializedProblem serialize_problem(const Problem& p) {
  SerializedProblem out;
  for (std::size_t i = 0; i < p.context.size(); ++i) {
    if (i > 0) out.source.emplace_back("|");
    append_panel(p.context[i], out.source);
  }
  for (std::size_t i = 0; i < p.answer_set.size(); ++i) {
    out.choices[i] = serialize_panel(p.answer_set[i]);
  }
  out.target = out.choices.at(static_cast<std::size_t>(p.correct_index));
  return out;
}

// ---------------------------------------------------------------------------
// JSON records

inline Json rule_to_json(const RuleInstance& r) {
  Json j;
  j["attribute"] = to_name(r.attribute);
  j["rule"] = to_name(r.kind);
  j["param"] = r.param;
  if (r.kind == RuleKind::DistributeThree) {
    j["triple"] = r.triple;
    j["permutation"] = r.permutation;
  }
  return j;
}

inline Json problem_to_json(const Problem& p) {
  Json j;
  j["id"] = p.id;
  j["config"] = to_name(p.configuration);
  Json assignments = Json::array();
  for (const auto& a : p.assignments) {
    Json comp;
    for (std::size_t s = 0; s < 4; ++s) comp[std::string(to_name(kAllRuleSlots[s]))] = rule_to_json(a.slots[s]);
    assignments.push_back(std::move(comp));
  }
  j["assignments"] = std::move(assignments);
  Json ctx = Json::array();
  for (const auto& panel : p.context) ctx.push_back(render(serialize_panel(panel)));
  j["context"] = std::move(ctx);
  Json ans = Json::array();
  for (const auto& panel : p.answer_set) ans.push_back(render(serialize_panel(panel)));
  j["answer_set"] = std::move(ans);
  j["correct_index"] = p.correct_index;
  Json present = Json::array();
  for (auto k : p.rules_present.kinds()) present.push_back(to_name(k));
  j["rules_present"] = std::move(present);
  return j;
}

namespace detail {

inline const Json& field(const Json& j, const char* name, std::size_t line) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(line, name, "missing");
  return j.at(name);
}

inline std::string string_field(const Json& j, const char* name, std::size_t line) {
  const auto& v = field(j, name, line);
  if (!v.is_string()) throw SchemaError(line, name, "expected a string");
  return v.get<std::string>();
}

inline int int_field(const Json& j, const char* name, std::size_t line) {
  const auto& v = field(j, name, line);
  if (!v.is_number_integer()) throw SchemaError(line, name, "expected an integer");
  return v.get<int>();
}

template <typename E>
E enum_field(const Json& j, const char* name, std::size_t line) {
  const auto s = string_field(j, name, line);
  const auto v = from_name<E>(s);
  if (!v) throw SchemaError(line, name, "unknown name '" + s + "'");
  return *v;
}

inline RuleInstance rule_from_json(const Json& j, std::size_t line) {
  RuleInstance r;
  r.attribute = enum_field<AttributeKind>(j, "attribute", line);
  r.kind = enum_field<RuleKind>(j, "rule", line);
  r.param = int_field(j, "param", line);
  if (r.kind == RuleKind::DistributeThree) {
    const auto& t = field(j, "triple", line);
    if (!t.is_array() || t.size() != 3) throw SchemaError(line, "triple", "expected 3 integers");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!t[i].is_number_integer()) throw SchemaError(line, "triple", "expected 3 integers");
      r.triple[i] = t[i].get<int>();
    }
    r.permutation = int_field(j, "permutation", line);
  }
  return r;
}

template <std::size_t N>
std::array<Panel, N> panels_from_json(const Json& j, const char* name, Configuration cfg,
                                      std::size_t line) {
  const auto& arr = field(j, name, line);
  if (!arr.is_array() || arr.size() != N) {
    throw SchemaError(line, name, "expected " + std::to_string(N) + " panels");
  }
  std::array<Panel, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    if (!arr[i].is_string()) throw SchemaError(line, name, "panels are strings");
    try {
      out[i] = parse_panel(arr[i].get<std::string>(), cfg);
    } catch (const Error& e) {
      throw SchemaError(line, name, "panel " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace detail

/// Inverse of problem_to_json. `line` is used for error messages only.
inline Problem problem_from_json(const Json& j, std::size_t line = 0) {
  Problem p;
  p.id = detail::string_field(j, "id", line);
  p.configuration = detail::enum_field<Configuration>(j, "config", line);
  const auto& assignments = detail::field(j, "assignments", line);
  if (!assignments.is_array() ||
      static_cast<int>(assignments.size()) != component_count(p.configuration)) {
    throw SchemaError(line, "assignments", "expected one entry per component");
  }
  for (const auto& comp : assignments) {
    RuleAssignment a;
    for (std::size_t s = 0; s < 4; ++s) {
      const std::string key(to_name(kAllRuleSlots[s]));
      if (!comp.is_object() || !comp.contains(key)) throw SchemaError(line, "assignments", "missing slot " + key);
      a.slots[s] = detail::rule_from_json(comp.at(key), line);
    }
    p.assignments.push_back(a);
  }
  p.context = detail::panels_from_json<kContextPanels>(j, "context", p.configuration, line);
  p.answer_set = detail::panels_from_json<kCandidates>(j, "answer_set", p.configuration, line);
  p.correct_index = detail::int_field(j, "correct_index", line);
  if (p.correct_index < 0 || p.correct_index >= kCandidates) {
    throw SchemaError(line, "correct_index", "outside [0, 7]");
  }
  const auto& present = detail::field(j, "rules_present", line);
  if (!present.is_array()) throw SchemaError(line, "rules_present", "expected an array");
  for (const auto& k : present) {
    const auto v = k.is_string() ? from_name<RuleKind>(k.get<std::string>()) : std::nullopt;
    if (!v) throw SchemaError(line, "rules_present", "unknown rule");
    p.rules_present.insert(*v);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Files

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

inline Json parse_line(const std::string& text, std::size_t line) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(line, "<record>", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

inline void write_dataset_stream(const Dataset& ds, std::ostream& out) {
  out << Json{{"meta", ds.meta}}.dump() << '\n';
  for (const auto& p : ds.problems) out << problem_to_json(p).dump() << '\n';
}

inline void write_dataset(const Dataset& ds, const std::string& path) {
  auto out = detail::open_out(path);
  write_dataset_stream(ds, out);
  detail::finish(out, path);
}

inline Dataset read_dataset_stream(std::istream& in) {
  Dataset ds;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const Json j = detail::parse_line(text, line);
    if (line == 1 && j.is_object() && j.contains("meta") && !j.contains("id")) {
      ds.meta = j.at("meta");
      continue;
    }
    ds.problems.push_back(problem_from_json(j, line));
  }
  return ds;
}

inline Dataset read_dataset(const std::string& path) {
  auto in = detail::open_in(path);
  return read_dataset_stream(in);
}

inline std::vector<PredictionRecord> read_predictions_stream(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const Json j = detail::parse_line(text, line);
    PredictionRecord r;
    r.id = detail::string_field(j, "id", line);
    const auto& t = detail::field(j, "tokens", line);
    if (t.is_string()) {
      r.tokens = tokenize(t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& tok : t) {
        if (!tok.is_string()) throw SchemaError(line, "tokens", "tokens must be strings");
        r.tokens.push_back(tok.get<std::string>());
      }
    } else {
      throw SchemaError(line, "tokens", "expected an array of strings or a string");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<PredictionRecord> read_predictions(const std::string& path) {
  auto in = detail::open_in(path);
  return read_predictions_stream(in);
}

inline void write_predictions(const std::vector<PredictionRecord>& preds, const std::string& path) {
  auto out = detail::open_out(path);
  for (const auto& r : preds) out << Json{{"id", r.id}, {"tokens", r.tokens}}.dump() << '\n';
  detail::finish(out, path);
}

/// Training corpus: one "source<TAB>target" line per problem. The answer
/// index is never written. Optional sidecars list ids and the candidate
/// sequences (in answer-set order) line-aligned with the corpus.
inline void write_corpus_streams(std::span<const Problem> problems, std::ostream& corpus,
                                 std::ostream* ids, std::ostream* choices) {
  for (const auto& p : problems) {
    const auto s = serialize_problem(p);
    corpus << render(s.source) << '\t' << render(s.target) << '\n';
    if (ids) *ids << p.id << '\n';
    if (choices) {
      Json c = Json::array();
      for (const auto& ch : s.choices) c.push_back(render(ch));
      *choices << Json{{"id", p.id}, {"choices", std::move(c)}}.dump() << '\n';
    }
  }
}

}  // namespace rpmforge
