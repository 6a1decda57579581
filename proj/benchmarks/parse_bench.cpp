#include <benchmark/benchmark.h>

#include "common.hpp"
#include "lwb/lexer.hpp"
#include "lwb/parser.hpp"

namespace {

void BM_Tokenize(benchmark::State& state) {
  auto c = bench::shop_component();
  std::string text = bench::shop_model(100, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lwb::tokenize(c->lexer, text, "m"));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(1000)->Arg(10000);

void BM_Parse(benchmark::State& state) {
  auto c = bench::shop_component();
  std::string text = bench::shop_model(100, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = lwb::parse_text(*c, text, "m");
    if (!r.ok()) state.SkipWithError("parse failed");
    benchmark::DoNotOptimize(r.ast);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(1000)->Arg(10000);

}  // namespace
