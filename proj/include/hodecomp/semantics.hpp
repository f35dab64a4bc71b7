#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hodecomp/ast.hpp"
#include "hodecomp/typecheck.hpp"

namespace hodecomp {

enum class Rule { App, Pass, Sel };

struct Redex {
  Rule rule = Rule::App;
  // Positions of the participating components in the flattened parallel
  // composition, in left-to-right order.
  std::vector<std::size_t> path;
  std::vector<std::string> participants;
};

struct TraceStep {
  int index = 0;
  Redex redex;
  ProcP term;
};

enum class Terminal { Inert, FuelExhausted, Stuck };

struct Trace {
  std::vector<TraceStep> steps;
  Terminal terminal = Terminal::Stuck;
  ProcP initial;
  ProcP final;
  std::vector<ProcP> terminals; // exhaustive policy only, sorted by canonical key
};

enum class Policy { Deterministic, Exhaustive };

// ν floated to the top of each parallel level, 0 and unused restrictions
// dropped, components sorted; applied under prefixes and abstractions too.
ProcP normalize(const ProcP& p);
// Key of the ≡/α class: binders renamed canonically after normalize.
std::string canonical_key(const ProcP& p);
bool congruent(const ProcP& p, const ProcP& q);

std::vector<std::pair<Redex, ProcP>> step(const ProcP& p);

// 0, or restricted inputs and branchings without a partner.
bool is_inert(const ProcP& p);

// Deterministic: most recently enabled redex first, ties broken by the
// rightmost participant. Exhaustive: breadth-first over canonical keys with
// fuel as the depth bound.
Trace run(const ProcP& p, Policy policy, int fuel);

struct Exploration {
  struct Node {
    ProcP term;
    std::string key;
    int depth = 0;
    std::vector<std::pair<Redex, std::size_t>> succ;
  };
  std::vector<Node> nodes;
  std::vector<std::size_t> terminals;
  bool complete = true;
};

Exploration explore(const ProcP& p, int fuel, std::size_t max_states = 100000);

// Δ unchanged followed by every Δ′ reachable in one env_step.
std::vector<TypeEnvs> envs_after_step(const TypeEnvs& envs);

std::string to_string(Rule r);
std::string to_string(Terminal t);
// One JSON object per line: {step, rule, path, participants, term}, then a
// closing {terminal} record.
std::string trace_jsonl(const Trace& t);

} // namespace hodecomp
