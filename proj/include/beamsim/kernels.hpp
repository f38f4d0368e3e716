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

#pragma once

#include "beamsim/channel.hpp"

#include <span>
#include <vector>

namespace beamsim
{

/// Received power (watts) at every UE from every codebook beam for one frozen
/// scene. Row u holds the powers UE u sees; interference and signal terms are
/// both lookups into this table.
struct PowerTable
{
    std::size_t n_ue = 0;
    std::size_t n_beams = 0;
    std::vector<double> watts;

    double at(UeIndex u, BeamIndex b) const noexcept { return watts[u * n_beams + b]; }
    std::span<const double> row(UeIndex u) const noexcept
    {
        return std::span<const double>(watts).subspan(u * n_beams, n_beams);
    }
};

struct BestResponse
{
    BeamIndex beam = 0;
    double total_bps = 0.0;
};

/// Parallel kernels used by the simulator. Loops are split with OpenMP when
/// the work is large enough to amortize a parallel region.
namespace kernels
{

PowerTable power_table(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

Throughput measure(const PowerTable& table, double noise_w, double bandwidth_hz, const Assignment& assignment);

/// Total throughput for every candidate beam of UE `u` with the other UEs
/// held at `assignment` (assignment[u] is ignored). O(n_beams * n_ue).
std::vector<double> candidate_totals(const PowerTable& table, double noise_w, double bandwidth_hz,
                                     const Assignment& assignment, UeIndex u);

/// Argmax of candidate_totals; ties go to the lowest beam index.
BestResponse best_response(const PowerTable& table, double noise_w, double bandwidth_hz,
                           const Assignment& assignment, UeIndex u);

} // namespace kernels

/// Serial reference implementations built directly on the channel functions.
/// Slow and straightforward; kept for tests and benchmarks.
namespace reference
{

PowerTable power_table(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

BestResponse best_response(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb,
                           const Assignment& assignment, UeIndex u);

} // namespace reference

} // namespace beamsim
