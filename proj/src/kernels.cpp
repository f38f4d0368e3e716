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

#include "beamsim/kernels.hpp"

#include "beamsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace beamsim
{

namespace
{

constexpr std::size_t kParallelThreshold = 4096;

} // namespace

namespace kernels
{

PowerTable power_table(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb)
{
    const std::size_t n_ue = scene.n_ue();
    const std::size_t n_beams = cb.n_beams();
    PowerTable t{n_ue, n_beams, std::vector<double>(n_ue * n_beams)};

    std::vector<double> cos_beam(n_beams);
    for (BeamIndex b = 0; b < n_beams; ++b)
    {
        cos_beam[b] = std::cos(cb.angle_of(b));
    }
    // Distance and angle terms are per UE; only the pattern varies per beam.
    std::vector<double> scale(n_ue);
    std::vector<double> cos_ue(n_ue);
    for (UeIndex u = 0; u < n_ue; ++u)
    {
        // received_power at the steering angle itself is scale * 1
        const double theta = scene.angle_to_bs(u);
        scale[u] = received_power(params, scene.distance_km(u), theta, theta);
        cos_ue[u] = std::cos(theta);
    }
    const double half_aperture = static_cast<double>(params.n_antennas) * std::numbers::pi * params.d_a;

    const auto total = static_cast<std::ptrdiff_t>(n_ue * n_beams);
#pragma omp parallel for schedule(static) if (total >= static_cast<std::ptrdiff_t>(kParallelThreshold))
    for (std::ptrdiff_t i = 0; i < total; ++i)
    {
        const auto u = static_cast<std::size_t>(i) / n_beams;
        const auto b = static_cast<std::size_t>(i) % n_beams;
        const double psi = half_aperture * (cos_ue[u] - cos_beam[b]);
        double pattern = 1.0;
        if (psi != 0.0)
        {
            const double s = std::sin(psi) / psi;
            pattern = s * s;
        }
        t.watts[static_cast<std::size_t>(i)] = scale[u] * pattern;
    }
    return t;
}

Throughput measure(const PowerTable& table, double noise_w, double bandwidth_hz, const Assignment& assignment)
{
    const std::size_t n_ue = table.n_ue;
    if (assignment.size() != n_ue)
    {
        throw AssignmentError(fmt::format("assignment covers {} UEs, scene has {}", assignment.size(), n_ue));
    }
    for (UeIndex u = 0; u < n_ue; ++u)
    {
        if (assignment[u] == kNoBeam || assignment[u] >= table.n_beams)
        {
            throw AssignmentError(fmt::format("UE {} has no valid beam", u));
        }
    }

    Throughput out;
    out.per_ue_bps.resize(n_ue);
    out.per_ue_sinr.resize(n_ue);
    for (UeIndex u = 0; u < n_ue; ++u)
    {
        const auto row = table.row(u);
        double interference = 0.0;
        for (UeIndex v = 0; v < n_ue; ++v)
        {
            if (v != u)
            {
                interference += row[assignment[v]];
            }
        }
        const double s = row[assignment[u]] / (noise_w + interference);
        const double se = std::log2(1.0 + s);
        out.per_ue_sinr[u] = s;
        out.per_ue_bps[u] = bandwidth_hz * se;
        out.se_total += se;
        out.total_bps += out.per_ue_bps[u];
    }
    return out;
}

std::vector<double> candidate_totals(const PowerTable& table, double noise_w, double bandwidth_hz,
                                     const Assignment& assignment, UeIndex u)
{
    const std::size_t n_ue = table.n_ue;
    const std::size_t n_beams = table.n_beams;
    if (u >= n_ue || assignment.size() != n_ue)
    {
        throw IndexError(fmt::format("UE {} / assignment size {} inconsistent with {} UEs", u, assignment.size(), n_ue));
    }
    for (UeIndex w = 0; w < n_ue; ++w)
    {
        if (w != u && (assignment[w] == kNoBeam || assignment[w] >= n_beams))
        {
            throw AssignmentError(fmt::format("UE {} has no valid beam", w));
        }
    }

    // Noise plus interference every UE sees from everyone except u.
    std::vector<double> base(n_ue, noise_w);
    for (UeIndex v = 0; v < n_ue; ++v)
    {
        for (UeIndex w = 0; w < n_ue; ++w)
        {
            if (w != v && w != u)
            {
                base[v] += table.at(v, assignment[w]);
            }
        }
    }

    std::vector<double> totals(n_beams);
    const auto nb = static_cast<std::ptrdiff_t>(n_beams);
#pragma omp parallel for schedule(static) if (n_beams * n_ue >= kParallelThreshold)
    for (std::ptrdiff_t bi = 0; bi < nb; ++bi)
    {
        const auto b = static_cast<BeamIndex>(bi);
        double se = std::log2(1.0 + table.at(u, b) / base[u]);
        for (UeIndex v = 0; v < n_ue; ++v)
        {
            if (v != u)
            {
                se += std::log2(1.0 + table.at(v, assignment[v]) / (base[v] + table.at(v, b)));
            }
        }
        totals[b] = bandwidth_hz * se;
    }
    return totals;
}

BestResponse best_response(const PowerTable& table, double noise_w, double bandwidth_hz,
                           const Assignment& assignment, UeIndex u)
{
    const auto totals = candidate_totals(table, noise_w, bandwidth_hz, assignment, u);
    BestResponse best{0, totals[0]};
    for (BeamIndex b = 1; b < totals.size(); ++b)
    {
        if (totals[b] > best.total_bps)
        {
            best = {b, totals[b]};
        }
    }
    return best;
}

} // namespace kernels

namespace reference
{

PowerTable power_table(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb)
{
    PowerTable t{scene.n_ue(), cb.n_beams(), std::vector<double>(scene.n_ue() * cb.n_beams())};
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        for (BeamIndex b = 0; b < cb.n_beams(); ++b)
        {
            t.watts[u * cb.n_beams() + b] =
                received_power(params, scene.distance_km(u), scene.angle_to_bs(u), cb.angle_of(b));
        }
    }
    return t;
}

BestResponse best_response(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb,
                           const Assignment& assignment, UeIndex u)
{
    Assignment trial = assignment;
    BestResponse best{0, -1.0};
    for (BeamIndex b = 0; b < cb.n_beams(); ++b)
    {
        trial[u] = b;
        const double total = throughput(scene, params, trial, cb).total_bps;
        if (total > best.total_bps)
        {
            best = {b, total};
        }
    }
    return best;
}

} // namespace reference

} // namespace beamsim
