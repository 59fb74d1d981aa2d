#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace appsim {

// The fixed 13-kind manipulation vocabulary. Enum order doubles as the
// canonical action ordering used for oracle tie-breaking.
enum class ActionKind {
  Press,
  Rotate,
  Open,
  Close,
  Touch,
  Slide,
  Flip,
  Pull,
  Push,
  Pick,
  Place,
  Move,
  Pour,
};

inline constexpr int kActionKindCount = 13;

const char* to_string(ActionKind k);
std::optional<ActionKind> action_kind_from(std::string_view name);
bool is_object_action(ActionKind k);

struct AtomicAction {
  ActionKind kind = ActionKind::Press;
  std::string part;          // appliance actions and Pour target
  std::string target_state;  // Press/Rotate/Slide/Flip
  std::string object;        // Pick/Place/Move/Pour
  std::string start_pos;     // Move
  std::string end_pos;       // Move
  int64_t times = 0;         // Press/Touch, >= 1
  double degrees = 0.0;      // Rotate, signed
};

class ActionParseError : public std::runtime_error {
 public:
  enum class Code { Syntax, UnknownActionKind, ArityError, ArgTypeError };

  ActionParseError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

const char* to_string(ActionParseError::Code code);

struct Plan {
  std::vector<AtomicAction> steps;
};

struct PlanLineError {
  int line = 0;  // 1-based
  std::string message;
};

class PlanParseError : public std::runtime_error {
 public:
  PlanParseError(std::vector<PlanLineError> errors, const std::string& message)
      : std::runtime_error(message), errors_(std::move(errors)) {}
  const std::vector<PlanLineError>& errors() const { return errors_; }

 private:
  std::vector<PlanLineError> errors_;
};

// Grammar: Kind(arg1, arg2, ...). Identifier or quoted-string args for names
// and state labels, decimal numerics for counts and degrees.
AtomicAction parse_action(std::string_view text);

// Canonical one-line form; parse_action(format_action(a)) == a.
std::string format_action(const AtomicAction& a);

// One action per line; blank lines and '#' comments ignored.
Plan parse_plan(std::string_view text);

std::string format_plan(const Plan& plan);

// Exact kind/string/count match; degrees within 1e-6 absolute.
bool action_equal(const AtomicAction& a, const AtomicAction& b);

}  // namespace appsim
