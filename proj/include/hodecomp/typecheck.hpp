#pragma once

#include <map>
#include <string>
#include <vector>

#include "hodecomp/ast.hpp"

namespace hodecomp {

struct TypeEnvs {
  std::map<Name, TypeP> gamma_names;      // shared names, base and channel name-variables
  std::map<std::string, TypeP> gamma_vars; // shared and base variables
  std::map<std::string, TypeP> lambda;     // linear variables
  std::map<Name, TypeP> delta;             // session names
};

struct Diagnostic {
  std::string path;
  std::string rule;
  std::string message;
};

struct CheckResult {
  bool ok = true;
  TypeEnvs leftover;
  std::vector<Diagnostic> diagnostics;
};

// Environments built from free-name declarations: chan types go to Γ,
// session types (and their duals when both endpoints are declared) to Δ.
TypeEnvs envs_from_decls(const std::vector<std::pair<Name, TypeP>>& decls);

CheckResult check_process(const TypeEnvs& envs, const ProcP& p);
std::pair<TypeP, CheckResult> check_value(const TypeEnvs& envs, const ValP& v);

// check_process plus minimality of every type met in the derivation.
CheckResult check_minimal_typed(const ProcP& p, const TypeEnvs& envs = {});

std::string to_string(const Diagnostic& d);

} // namespace hodecomp
