#pragma once

#include <stdexcept>

#include "hodecomp/ast.hpp"
#include "hodecomp/decompose.hpp"

namespace hodecomp {

struct OptimizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Type of the dummy parameter of a thunk: chan(un(end)).
TypeP thunk_param_type();
// lin(chan(un(end))), the type of a thunk.
TypeP thunk_type();
// λ(t:chan(un(end))).body with t fresh.
ValP thunk(const ProcP& body);
bool is_thunk(const ValP& v);
// c?(b).new t in (b t)
ProcP activator(const Name& c);

// Longest sequence of nested prefixes, thunk bodies excluded when
// skip_thunks is set.
int prefix_depth(const ProcP& p, bool skip_thunks);
// Maximum over the process and every abstraction body it contains.
int max_prefix_depth(const ProcP& p, bool skip_thunks);

// Every three-prefix sequence π1.π2.π3.R becomes π1.c̄_d!<{π2.π3.R}> |
// c_d?(b).(b t) with d fresh; propagators are then renumbered so that d
// follows the propagator of π1.
ProcP to_duos(const ProcP& p);

// Polyadic communications in p: (arity, subject) for every prefix whose
// payload or binder tuple does not have exactly one element.
std::vector<std::pair<std::size_t, Name>> non_monadic_prefixes(const ProcP& p);

// Thunk-passing breakdown with one forwarding propagator per use of an
// input-bound variable.
ProcP monadic_breakdown(const BreakdownState& st, const ProcP& p);
Decomposition monadic_decompose(const ProcP& p, const NameTypes& free = {}, int k = 1);

} // namespace hodecomp
