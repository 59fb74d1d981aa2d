#pragma once

#include <initializer_list>
#include <string>

#include "appsim/errors.hpp"
#include "json.hpp"

namespace appsim {

// Strict-access helpers shared by the spec, episode and state loaders.

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& where) {
  if (!j.contains(key)) {
    throw SpecError(SpecError::Code::MissingField, std::string("missing field '") + key + "'",
                    where);
  }
  return j.at(key);
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw SpecError(SpecError::Code::UnknownField, "unknown field '" + it.key() + "'", where);
    }
  }
}

inline std::string get_string(const nlohmann::json& j, const char* key,
                              const std::string& where) {
  const nlohmann::json& v = require(j, key, where);
  if (!v.is_string()) {
    throw SpecError(SpecError::Code::BadType, std::string("'") + key + "' must be a string",
                    where);
  }
  return v.get<std::string>();
}

inline int64_t get_int(const nlohmann::json& j, const char* key, const std::string& where) {
  const nlohmann::json& v = require(j, key, where);
  if (!v.is_number_integer()) {
    throw SpecError(SpecError::Code::BadType, std::string("'") + key + "' must be an integer",
                    where);
  }
  return v.get<int64_t>();
}

inline double get_number(const nlohmann::json& j, const char* key, const std::string& where) {
  const nlohmann::json& v = require(j, key, where);
  if (!v.is_number()) {
    throw SpecError(SpecError::Code::BadType, std::string("'") + key + "' must be a number",
                    where);
  }
  return v.get<double>();
}

}  // namespace appsim
