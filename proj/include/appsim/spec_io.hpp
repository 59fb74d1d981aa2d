#pragma once

#include <string>
#include <string_view>

#include "appsim/spec.hpp"

namespace appsim {

// Parses and fully resolves a spec document. Strict: unknown fields, missing
// fields, bad types, bad values, duplicate or unresolved names all throw
// SpecError. source_name only decorates error messages.
ApplianceSpec load_spec(std::string_view text, const std::string& source_name = "spec");

ApplianceSpec load_spec_file(const std::string& path);

// Canonical serialization: fixed key order, defaults filled in, optional
// fields omitted only when empty. serialize(load(serialize(s))) is
// byte-identical to serialize(s).
std::string serialize_spec(const ApplianceSpec& spec);

// Name/domain resolution for predicates and effects that live outside the
// spec document itself (episode goals, perturbations). Throws SpecError.
void check_predicate_against_spec(const ApplianceSpec& spec, const Predicate& p,
                                  const std::string& where);
void check_effect_against_spec(const ApplianceSpec& spec, const Effect& e,
                               const std::string& where);

}  // namespace appsim
