// SPDX-License-Identifier: Apache-2.0
//
// beamsim: two-step beam management simulator for mm-wave downlinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Serial reference against the OpenMP kernels. Run with OMP_NUM_THREADS set
// to compare thread counts; the `threads` argument pins it per benchmark.

#include "beamsim/environment.hpp"
#include "beamsim/kernels.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace
{

using namespace beamsim;

struct Fixture
{
    BeamCodebook cb;
    ChannelParams params;
    Scene scene;
    Assignment assignment;

    explicit Fixture(std::size_t n_ue, std::size_t n_beams)
        : cb(build_codebook(n_beams, 8, {0.0, 3.14159265358979323846}))
    {
        SceneConfig sc;
        sc.n_ue = n_ue;
        scene = new_scene(sc, 7);
        assignment.assign(n_ue, 0);
        for (std::size_t u = 0; u < n_ue; ++u)
        {
            assignment[u] = (u * 13) % n_beams;
        }
    }
};

void BM_PowerTableReference(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), 64);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(reference::power_table(f.scene, f.params, f.cb));
    }
}

void BM_PowerTableKernel(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), 64);
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(kernels::power_table(f.scene, f.params, f.cb));
    }
}

void BM_BestResponseReference(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), 64);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(reference::best_response(f.scene, f.params, f.cb, f.assignment, 0));
    }
}

void BM_BestResponseKernel(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), 64);
    const auto table = kernels::power_table(f.scene, f.params, f.cb);
    const double noise_w = dbm_to_watts(f.params.noise_dbm);
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(kernels::best_response(table, noise_w, f.params.bandwidth_hz, f.assignment, 0));
    }
}

void BM_JointOracle(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), 64);
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(joint_oracle(f.scene, f.params, f.cb));
    }
}

} // namespace

BENCHMARK(BM_PowerTableReference)->Arg(5)->Arg(25)->Arg(200);
BENCHMARK(BM_PowerTableKernel)->ArgsProduct({{5, 25, 200}, {1, 4}});
BENCHMARK(BM_BestResponseReference)->Arg(5)->Arg(25)->Arg(200);
BENCHMARK(BM_BestResponseKernel)->ArgsProduct({{5, 25, 200}, {1, 4}});
BENCHMARK(BM_JointOracle)->ArgsProduct({{5, 25}, {1, 4}});

BENCHMARK_MAIN();
