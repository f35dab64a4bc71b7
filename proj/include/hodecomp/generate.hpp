#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodecomp/ast.hpp"

namespace hodecomp {

struct GenOptions {
  int max_depth = 5;       // nested prefixes, abstraction bodies included
  int max_session = 3;     // prefixes per generated session type
  double rec_rate = 0.25;  // chance of adding a tail-recursive name pair
  double shared_rate = 0.2; // chance of adding a shared-name exchange
};

// Constructs met in a process, abstraction bodies included.
struct Coverage {
  int output = 0, input = 0, select = 0, branch = 0, app = 0, par = 0, res = 0, inact = 0;
  int lin_abs = 0, un_abs = 0, rec_names = 0, shared_names = 0;
  Coverage& operator+=(const Coverage& o);
  // Every counter is positive.
  bool complete() const;
  std::string summary() const;
};

Coverage coverage(const ProcP& p);

struct Generated {
  std::string text; // surface syntax
  ProcP process;
};

// A closed well-typed process: dual endpoints of random session types
// implemented side by side, optionally with recursive names kept alive by
// self-passing servers and with shared-name exchanges.
Generated generate_process(std::uint64_t seed, const GenOptions& o = {});

// n processes from consecutive seeds, each within o.max_depth.
std::vector<Generated> generate_processes(std::size_t n, std::uint64_t seed, const GenOptions& o = {});

} // namespace hodecomp
