#pragma once

#include <string>
#include <vector>

#include "hodecomp/ast.hpp"
#include "hodecomp/decompose.hpp"
#include "hodecomp/semantics.hpp"
#include "hodecomp/syntax.hpp"
#include "hodecomp/typecheck.hpp"

namespace hodecomp {

enum class Opt { None, Duos, Monadic };

std::string to_string(Opt o);
// "none", "duos" or "monadic"; throws std::invalid_argument otherwise.
Opt parse_opt(const std::string& s);

// A parsed source file with main encoded into HO when it is name-passing.
struct Program {
  SourceFile file;
  NameTypes env; // free names at their HO types
  ProcP source;  // null for a types-only file
};

Program load_program(const std::string& text);

struct Built {
  ProcP term;
  TypeEnvs envs;
  int degree = 0;
};

Built build(const Program& prog, Opt opt);

// Indices of the non-recursive propagators restricted in p outside
// abstractions, with repetitions.
std::vector<int> restricted_propagators(const ProcP& p);
// The restricted indices are exactly k .. k + degree - 1.
bool propagator_accounting(const ProcP& source, const ProcP& decomposed, int k = 1);

struct Verdict {
  std::string label;
  bool pass = false;
  std::string detail;
};

// Type check of the source, then every embedded expectation. With duos or
// monadic only the minimality check and the optimization's own shape
// condition apply.
std::vector<Verdict> check_program(const Program& prog, Opt opt = Opt::None);

bool all_pass(const std::vector<Verdict>& vs);

// Every state reachable within fuel steps is checked against the session
// environments obtained from its predecessors' by env_step.
struct ReductionReport {
  std::size_t states = 0;
  std::size_t ill_typed = 0;
  bool complete = true;
  std::string first_failure;
};

ReductionReport check_subject_reduction(const ProcP& p, const TypeEnvs& envs, int fuel);

// State reached after exactly n deterministic steps, or null when the run
// stops earlier.
ProcP state_after(const ProcP& p, int n);

} // namespace hodecomp
