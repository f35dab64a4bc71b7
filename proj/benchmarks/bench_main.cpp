#include <map>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "hodecomp/corpus.hpp"
#include "hodecomp/generate.hpp"
#include "hodecomp/optimize.hpp"
#include "hodecomp/program.hpp"
#include "hodecomp/semantics.hpp"
#include "hodecomp/typecheck.hpp"
#include "hodecomp/syntax.hpp"
#include "hodecomp/types.hpp"

using namespace hodecomp;

namespace {

const Program& corpus_program(const char* name) {
  static std::map<std::string, Program> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_program(find_corpus_entry(name)->text)).first;
  return it->second;
}

const std::vector<Generated>& generated() {
  static const std::vector<Generated> g = generate_processes(64, 1);
  return g;
}

void BM_Decompose(benchmark::State& st) {
  const Program& p = corpus_program("boolean-exchange");
  for (auto _ : st) benchmark::DoNotOptimize(decompose(p.source, p.env));
}
BENCHMARK(BM_Decompose);

void BM_DecomposeGenerated(benchmark::State& st) {
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(decompose(generated()[i % generated().size()].process));
    ++i;
  }
}
BENCHMARK(BM_DecomposeGenerated);

void BM_Optimize(benchmark::State& st) {
  const Program& p = corpus_program("boolean-exchange");
  Opt opt = st.range(0) ? Opt::Monadic : Opt::Duos;
  for (auto _ : st) benchmark::DoNotOptimize(build(p, opt));
}
BENCHMARK(BM_Optimize)->Arg(0)->Arg(1);

void BM_Typecheck(benchmark::State& st) {
  const Program& p = corpus_program("boolean-exchange");
  Built b = build(p, Opt::None);
  for (auto _ : st) benchmark::DoNotOptimize(check_process(b.envs, b.term));
}
BENCHMARK(BM_Typecheck);

void BM_Normalize(benchmark::State& st) {
  Built b = build(corpus_program("boolean-exchange"), Opt::None);
  for (auto _ : st) benchmark::DoNotOptimize(normalize(b.term));
}
BENCHMARK(BM_Normalize);

void BM_Run(benchmark::State& st) {
  Built b = build(corpus_program("boolean-exchange"), Opt::None);
  for (auto _ : st) benchmark::DoNotOptimize(run(b.term, Policy::Deterministic, 1000));
}
BENCHMARK(BM_Run);

void BM_Explore(benchmark::State& st) {
  Built b = build(corpus_program("math-server"), Opt::None);
  for (auto _ : st) benchmark::DoNotOptimize(explore(b.term, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Explore)->Arg(4)->Arg(8);

void BM_TypeDecompose(benchmark::State& st) {
  TypeP t = parse_type("!<lin(?<Int>;!<Bool>;end)>;?<un(Int)>;+{a: !<Int>;end, b: ?<Bool>;end}");
  for (auto _ : st) benchmark::DoNotOptimize(gdecomp(t));
}
BENCHMARK(BM_TypeDecompose);

} // namespace

BENCHMARK_MAIN();
