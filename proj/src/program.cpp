#include "hodecomp/program.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "hodecomp/optimize.hpp"
#include "hodecomp/types.hpp"

namespace hodecomp {

std::string to_string(Opt o) {
  switch (o) {
  case Opt::None: return "none";
  case Opt::Duos: return "duos";
  case Opt::Monadic: return "monadic";
  }
  return "?";
}

Opt parse_opt(const std::string& s) {
  if (s == "none") return Opt::None;
  if (s == "duos") return Opt::Duos;
  if (s == "monadic") return Opt::Monadic;
  throw std::invalid_argument("unknown optimization: " + s);
}

Program load_program(const std::string& text) {
  Program prog;
  prog.file = parse_source(text);
  for (auto& [n, t] : prog.file.free_names) prog.env[n] = t;
  if (!prog.file.main) return prog;
  if (!prog.file.namepass) {
    prog.source = prog.file.main;
    return prog;
  }
  prog.source = encode_namepass(prog.file.main, prog.env);
  NameTypes encoded;
  for (auto& [n, t] : prog.env) encoded[n] = encode_type(t);
  prog.env = std::move(encoded);
  return prog;
}

Built build(const Program& prog, Opt opt) {
  if (!prog.source) throw std::invalid_argument("program has no main process");
  Built b;
  b.degree = degree(prog.source);
  if (opt == Opt::Monadic) {
    Decomposition d = monadic_decompose(prog.source, prog.env);
    b.term = d.term;
    b.envs = d.envs;
    return b;
  }
  Decomposition d = decompose(prog.source, prog.env);
  b.term = opt == Opt::Duos ? to_duos(d.term) : d.term;
  b.envs = d.envs;
  return b;
}

namespace {

void collect_props(const ProcP& p, std::vector<int>& out) {
  std::visit(
      [&](auto&& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output> || std::is_same_v<T, Input> || std::is_same_v<T, Select>) {
          collect_props(x.cont, out);
        } else if constexpr (std::is_same_v<T, Branch>) {
          for (auto& [l, q] : x.cases) collect_props(q, out);
        } else if constexpr (std::is_same_v<T, Par>) {
          collect_props(x.left, out);
          collect_props(x.right, out);
        } else if constexpr (std::is_same_v<T, Res>) {
          if (x.name.propagator() && !x.name.rec_propagator()) out.push_back(x.name.index);
          collect_props(x.body, out);
        }
      },
      p->v);
}

Verdict verdict(std::string label, bool pass, std::string detail = {}) {
  return Verdict{std::move(label), pass, std::move(detail)};
}

std::string first_diag(const CheckResult& r) { return r.ok || r.diagnostics.empty() ? "" : to_string(r.diagnostics.front()); }

std::string show_list(const TypeList& ts) {
  std::string s = "[";
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + show(ts[i]);
  return s + "]";
}

// Steps of one deterministic run, reused across expectations on the same term.
struct Runs {
  ProcP term;
  int fuel = 0;
  Trace trace;
  const Trace& get(const ProcP& p, int n) {
    if (!term || term != p || fuel < n) {
      term = p;
      fuel = std::max(n, 1);
      trace = run(p, Policy::Deterministic, fuel);
    }
    return trace;
  }
};

Verdict reach(const std::string& label, Runs& runs, const ProcP& p, int n, const ProcP& expected) {
  const Trace& t = runs.get(p, n);
  if (static_cast<int>(t.steps.size()) < n) {
    return verdict(label, false, fmt::format("run stopped after {} steps ({})", t.steps.size(), to_string(t.terminal)));
  }
  ProcP got = n == 0 ? p : t.steps[n - 1].term;
  if (congruent(got, expected)) return verdict(label, true);
  return verdict(label, false, "reached " + print(normalize(got), {false}));
}

} // namespace

std::vector<int> restricted_propagators(const ProcP& p) {
  std::vector<int> out;
  collect_props(p, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool propagator_accounting(const ProcP& source, const ProcP& decomposed, int k) {
  std::vector<int> want(degree(source));
  std::iota(want.begin(), want.end(), k);
  return restricted_propagators(decomposed) == want;
}

bool all_pass(const std::vector<Verdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const Verdict& v) { return v.pass; });
}

ReductionReport check_subject_reduction(const ProcP& p, const TypeEnvs& envs, int fuel) {
  Exploration ex = explore(p, fuel);
  ReductionReport rep;
  rep.states = ex.nodes.size();
  rep.complete = ex.complete;
  auto env_key = [](const TypeEnvs& e) {
    std::string k;
    for (auto& [n, t] : e.delta) k += print_name(n) + ":" + show(t) + ";";
    return k;
  };
  // Candidate environments per node, filled from typed predecessors.
  std::vector<std::map<std::string, TypeEnvs>> cand(ex.nodes.size());
  cand[0][env_key(envs)] = envs;
  std::vector<bool> seen(ex.nodes.size(), false);
  std::vector<std::size_t> order;
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    order.push_back(i);
    for (auto& [r, j] : ex.nodes[i].succ)
      if (!seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
  }
  for (std::size_t i : order) {
    auto& node = ex.nodes[i];
    std::vector<TypeEnvs> typed;
    std::string diag;
    for (auto& [k, e] : cand[i]) {
      CheckResult r = check_process(e, node.term);
      if (r.ok) typed.push_back(e);
      else if (diag.empty()) diag = first_diag(r);
    }
    if (typed.empty()) {
      ++rep.ill_typed;
      if (rep.first_failure.empty())
        rep.first_failure = fmt::format("depth {}: {}: {}", node.depth, print(node.term, {false}), diag);
      continue;
    }
    for (auto& [r, j] : node.succ)
      for (auto& e : typed)
        for (auto& next : envs_after_step(e)) cand[j].emplace(env_key(next), next);
  }
  return rep;
}

ProcP state_after(const ProcP& p, int n) {
  if (n == 0) return p;
  Trace t = run(p, Policy::Deterministic, n);
  if (static_cast<int>(t.steps.size()) < n) return nullptr;
  return t.steps[n - 1].term;
}

std::vector<Verdict> check_program(const Program& prog, Opt opt) {
  std::vector<Verdict> out;
  const SourceFile& f = prog.file;
  for (auto& e : f.expected) {
    using K = Expectation::Kind;
    if (e.kind == K::GDecomp || e.kind == K::RsDecomp) {
      TypeList got = e.kind == K::GDecomp ? gdecomp(e.type) : rsdecomp(e.type);
      bool ok = type_equal(got, e.types);
      out.push_back(verdict(fmt::format("{} {}", e.target, show(e.type)), ok, ok ? "" : "got " + show_list(got)));
    } else if (e.kind == K::FIndex) {
      int got = findex(e.type);
      out.push_back(verdict(fmt::format("findex {} = {}", show(e.type), e.number), got == e.number,
                            got == e.number ? "" : fmt::format("got {}", got)));
    }
  }
  if (!prog.source) return out;

  CheckResult typed = check_process(source_envs(prog.env), prog.source);
  out.push_back(verdict("source well-typed", typed.ok, first_diag(typed)));
  if (!typed.ok) return out;

  Built b;
  try {
    b = build(prog, opt);
  } catch (const std::exception& ex) {
    out.push_back(verdict("decompose --opt " + to_string(opt), false, ex.what()));
    return out;
  }

  Runs source_runs, decomp_runs;
  for (auto& e : f.expected) {
    using K = Expectation::Kind;
    switch (e.kind) {
    case K::Degree: {
      if (opt != Opt::None) break;
      long got = -1;
      if (e.target == "main") {
        got = degree(prog.source);
      } else {
        auto v = std::find_if(f.values.begin(), f.values.end(), [&](auto& x) { return x.first == e.target; });
        auto q = std::find_if(f.procs.begin(), f.procs.end(), [&](auto& x) { return x.first == e.target; });
        if (v != f.values.end()) got = degree_val(v->second);
        else if (q != f.procs.end()) got = degree(q->second);
      }
      out.push_back(verdict(fmt::format("degree {} = {}", e.target, e.number), got == e.number,
                            got == e.number ? "" : fmt::format("got {}", got)));
      break;
    }
    case K::Encodes: {
      if (opt != Opt::None) break;
      bool ok = congruent(prog.source, e.term);
      out.push_back(verdict("encoding", ok, ok ? "" : "got " + print(prog.source, {false})));
      break;
    }
    case K::SourceSteps:
      if (opt != Opt::None) break;
      out.push_back(reach(fmt::format("source reaches expected state in {} steps", e.number), source_runs, prog.source,
                          static_cast<int>(e.number), e.term));
      break;
    case K::SourceInert: {
      if (opt != Opt::None) break;
      Trace t = run(prog.source, Policy::Deterministic, static_cast<int>(e.number) + 1);
      bool ok = t.terminal == Terminal::Inert && static_cast<long>(t.steps.size()) == e.number;
      out.push_back(verdict(fmt::format("source inert after {} steps", e.number), ok,
                            ok ? "" : fmt::format("{} after {} steps", to_string(t.terminal), t.steps.size())));
      break;
    }
    case K::DecompSteps:
      if (opt != Opt::None) break;
      out.push_back(reach(fmt::format("decomposition reaches expected state in {} steps", e.number), decomp_runs, b.term,
                          static_cast<int>(e.number), e.term));
      break;
    case K::Minimal: {
      CheckResult m = check_minimal_typed(b.term, b.envs);
      out.push_back(verdict("minimal typing (--opt " + to_string(opt) + ")", m.ok, first_diag(m)));
      if (opt == Opt::None) {
        out.push_back(verdict("propagator accounting", propagator_accounting(prog.source, b.term)));
      } else if (opt == Opt::Duos) {
        int d = max_prefix_depth(b.term, true);
        out.push_back(verdict("at most two prefixes outside thunks", d <= 2, fmt::format("depth {}", d)));
      } else {
        auto bad = non_monadic_prefixes(b.term);
        out.push_back(verdict("monadic payloads", bad.empty(),
                              bad.empty() ? "" : fmt::format("arity {} on {}", bad[0].first, print_name(bad[0].second))));
      }
      break;
    }
    default: break;
    }
  }
  return out;
}

} // namespace hodecomp
