// Copyright 2026 The locc-usd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "locc/canonical.hpp"
#include "locc/protocols.hpp"
#include "locc/simulate.hpp"

namespace {

// Local dimension d on every one of `parties` parties.
locc::PartySpace cube(std::int64_t d, std::int64_t parties) {
    return locc::PartySpace(std::vector<std::size_t>(static_cast<std::size_t>(parties), static_cast<std::size_t>(d)));
}

void BM_Canonicalize(benchmark::State& state) {
    const auto [phi, psi] = locc::random_pair(cube(state.range(0), 2), 0.4, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(locc::canonicalize(phi, psi, 0));
}
BENCHMARK(BM_Canonicalize)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Compile(benchmark::State& state) {
    const auto [phi, psi] = locc::random_pair(cube(state.range(0), state.range(1)), 0.4, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(locc::compile(phi, psi));
}
BENCHMARK(BM_Compile)->Args({2, 2})->Args({4, 2})->Args({8, 2})->Args({2, 3})->Args({3, 3});

void BM_EvaluateExact(benchmark::State& state) {
    const auto [phi, psi] = locc::random_pair(cube(state.range(0), state.range(1)), 0.4, 3);
    const auto tree = locc::compile(phi, psi);
    for (auto _ : state)
        benchmark::DoNotOptimize(locc::evaluate_exact(tree, phi, psi));
}
BENCHMARK(BM_EvaluateExact)->Args({2, 2})->Args({4, 2})->Args({2, 3})->Args({3, 3});

void BM_RunShots(benchmark::State& state) {
    const auto [phi, psi] = locc::random_pair(cube(3, 2), 0.4, 4);
    const auto tree = locc::compile(phi, psi);
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(locc::run_shots(tree, phi, 10000, 5, workers));
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RunShots)->Arg(1)->Arg(4)->UseRealTime();

} // namespace

BENCHMARK_MAIN();
