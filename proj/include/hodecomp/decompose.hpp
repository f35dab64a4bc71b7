#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodecomp/ast.hpp"
#include "hodecomp/typecheck.hpp"

namespace hodecomp {

struct DecomposeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int degree(const ProcP& p);
int degree_val(const ValP& v);

// Tail-recursive session types and their unfoldings.
bool is_recursive_session(const TypeP& t);

struct NameInfo {
  Name target; // current indexed name in the output
  TypeP type;  // current source type
  bool rec = false;
};

struct BreakdownState {
  int k = 1;
  std::vector<std::string> ctx;
  std::map<Name, NameInfo> names;    // keyed by source name
  std::map<std::string, TypeP> vars; // source variable types
  std::map<std::string, int> rank;   // binding order of variables
};

// Variables sorted by binding order; the tuple carried by propagators.
std::vector<std::string> context_order(const BreakdownState& st, std::vector<std::string> xs);

// Parameters standing for a binder of type c; recursive sessions also get a
// restricted server on their shared propagator.
struct BinderExpansion {
  std::vector<Binder> params;
  std::vector<std::pair<Name, TypeP>> server_res;
  std::vector<ProcP> servers;
  NameInfo info;
};

BinderExpansion expand_binder(const Name& base, const TypeP& c);
// Indexed names standing for a source name at its current type.
std::vector<Name> expand_target(const NameInfo& i);
// cr?(b).(b ns)
ProcP rec_server(const Name& cr, const std::vector<Name>& ns);
// The name's type moves to next; non-recursive sessions move to the next index.
BreakdownState advance_name(const BreakdownState& st, const Name& key, const TypeP& next);

// Free names initialized to index 1.
BreakdownState initial_state(const NameTypes& free, int k = 1);

ProcP breakdown_proc(const BreakdownState& st, const ProcP& p);
ValP breakdown_value(const BreakdownState& st, const ValP& v);

struct Decomposition {
  ProcP term;
  std::vector<Name> propagators;
  std::vector<Name> recpropagators;
  Subst sigma;
  TypeEnvs envs; // decomposed environment of the free names
};

TypeEnvs source_envs(const NameTypes& free);
TypeEnvs decomposed_envs(const NameTypes& free);

Decomposition decompose(const ProcP& p, const NameTypes& free = {}, int k = 1);

} // namespace hodecomp
