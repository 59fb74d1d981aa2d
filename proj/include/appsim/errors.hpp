#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace appsim {

// Hard failure while parsing or resolving a spec document.
class SpecError : public std::runtime_error {
 public:
  enum class Code {
    Syntax,
    MissingField,
    UnknownField,
    BadType,
    BadValue,
    DuplicateName,
    UnknownName,
  };

  SpecError(Code code, const std::string& message, std::string where = {})
      : std::runtime_error(where.empty() ? message : where + ": " + message),
        code_(code),
        where_(std::move(where)) {}

  Code code() const { return code_; }
  const std::string& where() const { return where_; }

 private:
  Code code_;
  std::string where_;
};

const char* to_string(SpecError::Code code);

// A safety lock or magnet refused the action.
class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(std::string part, std::string mechanism, const std::string& message)
      : std::runtime_error(message), part_(std::move(part)), mechanism_(std::move(mechanism)) {}
  const std::string& part() const { return part_; }
  const std::string& mechanism() const { return mechanism_; }

 private:
  std::string part_;
  std::string mechanism_;
};

class RuleOscillation : public std::runtime_error {
 public:
  explicit RuleOscillation(const std::string& message) : std::runtime_error(message) {}
};

class CascadeLimitExceeded : public std::runtime_error {
 public:
  explicit CascadeLimitExceeded(const std::string& message) : std::runtime_error(message) {}
};

class StateSpaceExceeded : public std::runtime_error {
 public:
  explicit StateSpaceExceeded(const std::string& message) : std::runtime_error(message) {}
};

class UnreachableGoal : public std::runtime_error {
 public:
  explicit UnreachableGoal(const std::string& message) : std::runtime_error(message) {}
};

class SchemaMismatch : public std::runtime_error {
 public:
  explicit SchemaMismatch(const std::string& message) : std::runtime_error(message) {}
};

class InvalidEffect : public std::runtime_error {
 public:
  explicit InvalidEffect(const std::string& message) : std::runtime_error(message) {}
};

class InvalidSpec : public std::runtime_error {
 public:
  explicit InvalidSpec(const std::string& message) : std::runtime_error(message) {}
};

class PageOutOfRange : public std::runtime_error {
 public:
  explicit PageOutOfRange(const std::string& message) : std::runtime_error(message) {}
};

class DegenerateBox : public std::runtime_error {
 public:
  explicit DegenerateBox(const std::string& message) : std::runtime_error(message) {}
};

// Reports mixing different tasks (or nothing at all) cannot be aggregated.
class MixedTask : public std::runtime_error {
 public:
  explicit MixedTask(const std::string& message) : std::runtime_error(message) {}
};

// Planner endpoint could not be spawned or reached at all; distinct from a
// malformed or late response, which merely scores zero.
class PlannerError : public std::runtime_error {
 public:
  explicit PlannerError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace appsim
