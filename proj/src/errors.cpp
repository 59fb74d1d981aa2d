#include "appsim/errors.hpp"

namespace appsim {

const char* to_string(SpecError::Code code) {
  switch (code) {
    case SpecError::Code::Syntax: return "Syntax";
    case SpecError::Code::MissingField: return "MissingField";
    case SpecError::Code::UnknownField: return "UnknownField";
    case SpecError::Code::BadType: return "BadType";
    case SpecError::Code::BadValue: return "BadValue";
    case SpecError::Code::DuplicateName: return "DuplicateName";
    case SpecError::Code::UnknownName: return "UnknownName";
  }
  return "?";
}

}  // namespace appsim
