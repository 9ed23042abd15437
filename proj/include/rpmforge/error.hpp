#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rpmforge {

enum class Errc {
  ParseError,
  DomainError,
  OutOfDomain,
  RuleViolated,
  Unsatisfiable,
  NoConsistentRule,
  GenerationExhausted,
  AttributeExhausted,
  Ambiguous,
  NoSolution,
  SchemaError,
  IoError,
  EmptyReference,
  UnknownId,
  DuplicateId,
  InvalidArgument,
};

inline constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ParseError: return "parse_error";
    case Errc::DomainError: return "domain_error";
    case Errc::OutOfDomain: return "out_of_domain";
    case Errc::RuleViolated: return "rule_violated";
    case Errc::Unsatisfiable: return "unsatisfiable";
    case Errc::NoConsistentRule: return "no_consistent_rule";
    case Errc::GenerationExhausted: return "generation_exhausted";
    case Errc::AttributeExhausted: return "attribute_exhausted";
    case Errc::Ambiguous: return "ambiguous";
    case Errc::NoSolution: return "no_solution";
    case Errc::SchemaError: return "schema_error";
    case Errc::IoError: return "io_error";
    case Errc::EmptyReference: return "empty_reference";
    case Errc::UnknownId: return "unknown_id";
    case Errc::DuplicateId: return "duplicate_id";
    case Errc::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

/// Base exception for every failure raised by the library. The code is
/// stable and is what the CLI reports in its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed token stream. `position` is the index of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& expected,
             const std::string& found)
      : Error(Errc::ParseError, "token " + std::to_string(position) +
                                    ": expected " + expected + ", found '" +
                                    found + "'"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Malformed JSONL record. Lines are 1-based.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& field,
              const std::string& detail)
      : Error(Errc::SchemaError, "line " + std::to_string(line) + ", field '" +
                                     field + "': " + detail),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace rpmforge
