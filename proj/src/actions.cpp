#include "appsim/actions.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <charconv>

#include "appsim/util.hpp"

namespace appsim {

namespace {

constexpr std::array<const char*, kActionKindCount> kKindNames = {
    "Press", "Rotate", "Open", "Close", "Touch", "Slide", "Flip",
    "Pull",  "Push",   "Pick", "Place", "Move",  "Pour",
};

enum class Slot { Name, Label, Count, Degrees };

struct Signature {
  std::vector<Slot> slots;
};

// Argument shapes per kind. Name slots bind part/object identifiers, Label
// slots bind state labels and symbolic positions.
const Signature& signature_for(ActionKind k) {
  static const std::array<Signature, kActionKindCount> sigs = {{
      {{Slot::Name, Slot::Label, Slot::Count}},    // Press(part, state, times)
      {{Slot::Name, Slot::Label, Slot::Degrees}},  // Rotate(part, state, degrees)
      {{Slot::Name}},                              // Open(part)
      {{Slot::Name}},                              // Close(part)
      {{Slot::Name, Slot::Count}},                 // Touch(part, times)
      {{Slot::Name, Slot::Label}},                 // Slide(part, state)
      {{Slot::Name, Slot::Label}},                 // Flip(part, state)
      {{Slot::Name}},                              // Pull(part)
      {{Slot::Name}},                              // Push(part)
      {{Slot::Name}},                              // Pick(obj)
      {{Slot::Name}},                              // Place(obj)
      {{Slot::Name, Slot::Label, Slot::Label}},    // Move(obj, start, end)
      {{Slot::Name, Slot::Name}},                  // Pour(obj, part)
  }};
  return sigs[static_cast<size_t>(k)];
}

struct Token {
  enum class Type { Ident, String, Number, End } type;
  std::string text;
  double number = 0.0;
  bool integral = false;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    if (pos_ >= text_.size()) return {Token::Type::End, "", 0.0, false};
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return {Token::Type::Ident, std::string(text_.substr(start, pos_ - start)), 0.0, false};
    }
    if (c == '"') {
      ++pos_;
      std::string out;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
          ++pos_;
          char e = text_[pos_];
          out += (e == 'n') ? '\n' : (e == 't') ? '\t' : e;
        } else {
          out += text_[pos_];
        }
        ++pos_;
      }
      if (pos_ >= text_.size()) {
        throw ActionParseError(ActionParseError::Code::Syntax, "unterminated string literal");
      }
      ++pos_;
      return {Token::Type::String, out, 0.0, false};
    }
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      if (c == '-' || c == '+') ++pos_;
      bool saw_digit = false, saw_dot = false, saw_exp = false;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          saw_digit = true;
        } else if (d == '.' && !saw_dot && !saw_exp) {
          saw_dot = true;
        } else if ((d == 'e' || d == 'E') && saw_digit && !saw_exp) {
          saw_exp = true;
          if (pos_ + 1 < text_.size() && (text_[pos_ + 1] == '+' || text_[pos_ + 1] == '-')) ++pos_;
        } else {
          break;
        }
        ++pos_;
      }
      if (!saw_digit) {
        throw ActionParseError(ActionParseError::Code::Syntax, "malformed number");
      }
      std::string raw(text_.substr(start, pos_ - start));
      double value = 0.0;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
      if (ec != std::errc() || p != raw.data() + raw.size()) {
        throw ActionParseError(ActionParseError::Code::Syntax, "malformed number '" + raw + "'");
      }
      Token t{Token::Type::Number, raw, value, !saw_dot && !saw_exp};
      return t;
    }
    throw ActionParseError(ActionParseError::Code::Syntax,
                           std::string("unexpected character '") + c + "'");
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

const char* to_string(ActionKind k) { return kKindNames[static_cast<size_t>(k)]; }

std::optional<ActionKind> action_kind_from(std::string_view name) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (name == kKindNames[i]) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

bool is_object_action(ActionKind k) {
  return k == ActionKind::Pick || k == ActionKind::Place || k == ActionKind::Move ||
         k == ActionKind::Pour;
}

const char* to_string(ActionParseError::Code code) {
  switch (code) {
    case ActionParseError::Code::Syntax: return "Syntax";
    case ActionParseError::Code::UnknownActionKind: return "UnknownActionKind";
    case ActionParseError::Code::ArityError: return "ArityError";
    case ActionParseError::Code::ArgTypeError: return "ArgTypeError";
  }
  return "?";
}

AtomicAction parse_action(std::string_view text) {
  Lexer lex(text);
  Token head = lex.next();
  if (head.type != Token::Type::Ident) {
    throw ActionParseError(ActionParseError::Code::Syntax, "expected action name");
  }
  auto kind = action_kind_from(head.text);
  if (!kind) {
    throw ActionParseError(ActionParseError::Code::UnknownActionKind,
                           "unknown action kind '" + head.text + "'");
  }
  if (!lex.consume('(')) {
    throw ActionParseError(ActionParseError::Code::Syntax, "expected '(' after action name");
  }

  const Signature& sig = signature_for(*kind);
  std::vector<Token> args;
  if (!lex.consume(')')) {
    while (true) {
      args.push_back(lex.next());
      if (args.back().type == Token::Type::End) {
        throw ActionParseError(ActionParseError::Code::Syntax, "unterminated argument list");
      }
      if (lex.consume(')')) break;
      if (!lex.consume(',')) {
        throw ActionParseError(ActionParseError::Code::Syntax, "expected ',' or ')'");
      }
    }
  }
  if (!lex.at_end()) {
    throw ActionParseError(ActionParseError::Code::Syntax, "trailing input after action");
  }
  if (args.size() != sig.slots.size()) {
    throw ActionParseError(ActionParseError::Code::ArityError,
                           std::string(to_string(*kind)) + " expects " +
                               std::to_string(sig.slots.size()) + " argument(s), got " +
                               std::to_string(args.size()));
  }

  AtomicAction a;
  a.kind = *kind;
  std::vector<std::string> strings;
  for (size_t i = 0; i < args.size(); ++i) {
    const Token& t = args[i];
    switch (sig.slots[i]) {
      case Slot::Name:
      case Slot::Label: {
        if (t.type != Token::Type::Ident && t.type != Token::Type::String) {
          throw ActionParseError(ActionParseError::Code::ArgTypeError,
                                 "argument " + std::to_string(i + 1) + " of " +
                                     to_string(*kind) + " must be a name or string");
        }
        if (t.text.empty()) {
          throw ActionParseError(ActionParseError::Code::ArgTypeError,
                                 "argument " + std::to_string(i + 1) + " of " +
                                     to_string(*kind) + " must be non-empty");
        }
        strings.push_back(t.text);
        break;
      }
      case Slot::Count: {
        if (t.type != Token::Type::Number || !t.integral || t.number < 1 || t.number > 1e9) {
          throw ActionParseError(ActionParseError::Code::ArgTypeError,
                                 "argument " + std::to_string(i + 1) + " of " +
                                     to_string(*kind) + " must be a positive integer");
        }
        a.times = static_cast<int64_t>(t.number);
        break;
      }
      case Slot::Degrees: {
        if (t.type != Token::Type::Number || !std::isfinite(t.number)) {
          throw ActionParseError(ActionParseError::Code::ArgTypeError,
                                 "argument " + std::to_string(i + 1) + " of " +
                                     to_string(*kind) + " must be a number");
        }
        a.degrees = t.number;
        break;
      }
    }
  }

  switch (*kind) {
    case ActionKind::Press:
    case ActionKind::Rotate:
      a.part = strings[0];
      a.target_state = strings[1];
      break;
    case ActionKind::Slide:
    case ActionKind::Flip:
      a.part = strings[0];
      a.target_state = strings[1];
      break;
    case ActionKind::Open:
    case ActionKind::Close:
    case ActionKind::Pull:
    case ActionKind::Push:
    case ActionKind::Touch:
      a.part = strings[0];
      break;
    case ActionKind::Pick:
    case ActionKind::Place:
      a.object = strings[0];
      break;
    case ActionKind::Move:
      a.object = strings[0];
      a.start_pos = strings[1];
      a.end_pos = strings[2];
      break;
    case ActionKind::Pour:
      a.object = strings[0];
      a.part = strings[1];
      break;
  }
  return a;
}

std::string format_action(const AtomicAction& a) {
  auto name = [](const std::string& s) { return is_identifier(s) ? s : quote(s); };
  std::string out = to_string(a.kind);
  out += '(';
  switch (a.kind) {
    case ActionKind::Press:
      out += name(a.part) + ", " + quote(a.target_state) + ", " + std::to_string(a.times);
      break;
    case ActionKind::Rotate:
      out += name(a.part) + ", " + quote(a.target_state) + ", " + canon_decimal(a.degrees);
      break;
    case ActionKind::Open:
    case ActionKind::Close:
    case ActionKind::Pull:
    case ActionKind::Push:
      out += name(a.part);
      break;
    case ActionKind::Touch:
      out += name(a.part) + ", " + std::to_string(a.times);
      break;
    case ActionKind::Slide:
    case ActionKind::Flip:
      out += name(a.part) + ", " + quote(a.target_state);
      break;
    case ActionKind::Pick:
    case ActionKind::Place:
      out += name(a.object);
      break;
    case ActionKind::Move:
      out += name(a.object) + ", " + quote(a.start_pos) + ", " + quote(a.end_pos);
      break;
    case ActionKind::Pour:
      out += name(a.object) + ", " + name(a.part);
      break;
  }
  out += ')';
  return out;
}

Plan parse_plan(std::string_view text) {
  Plan plan;
  std::vector<PlanLineError> errors;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    try {
      plan.steps.push_back(parse_action(line));
    } catch (const ActionParseError& e) {
      errors.push_back({static_cast<int>(i + 1),
                        std::string(to_string(e.code())) + ": " + e.what()});
    }
  }
  if (!errors.empty()) {
    std::string msg = "plan has " + std::to_string(errors.size()) + " bad line(s); first at line " +
                      std::to_string(errors.front().line) + ": " + errors.front().message;
    throw PlanParseError(std::move(errors), msg);
  }
  return plan;
}

std::string format_plan(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    out += format_action(step);
    out += '\n';
  }
  return out;
}

bool action_equal(const AtomicAction& a, const AtomicAction& b) {
  if (a.kind != b.kind) return false;
  if (a.part != b.part || a.target_state != b.target_state || a.object != b.object ||
      a.start_pos != b.start_pos || a.end_pos != b.end_pos) {
    return false;
  }
  if (a.times != b.times) return false;
  return std::fabs(a.degrees - b.degrees) <= 1e-6;
}

}  // namespace appsim
