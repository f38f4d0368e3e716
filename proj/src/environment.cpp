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

#include "beamsim/environment.hpp"

#include "beamsim/csv.hpp"
#include "beamsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>

namespace beamsim
{

double Scene::distance_m(UeIndex u) const
{
    const auto& p = ues.at(u).position;
    return std::hypot(p.x - bs_position.x, p.y - bs_position.y);
}

double Scene::angle_to_bs(UeIndex u) const
{
    const auto& p = ues.at(u).position;
    return std::atan2(p.y - bs_position.y, p.x - bs_position.x);
}

void Scene::place(UeIndex u, std::size_t loc)
{
    if (u >= ues.size() || loc >= location_table.at(u).size())
    {
        throw IndexError(fmt::format("cannot place UE {} at location {}", u, loc));
    }
    ues[u].location_index = loc;
    ues[u].position = location_table[u][loc];
}

void Scene::validate() const
{
    if (location_table.size() != ues.size())
    {
        throw ConfigError("scene: location table does not cover every UE");
    }
    for (UeIndex u = 0; u < ues.size(); ++u)
    {
        const auto& cands = location_table[u];
        if (cands.size() != n_loc || ues[u].location_index >= n_loc)
        {
            throw ConfigError(fmt::format("scene: UE {} has an inconsistent location table", u));
        }
        for (const auto& c : cands)
        {
            const double dx = c.x - bs_position.x;
            const double dy = c.y - bs_position.y;
            const double th = std::atan2(dy, dx);
            if (!(std::hypot(dx, dy) > 0.0) || !(th > 0.0 && th < std::numbers::pi))
            {
                throw ConfigError(fmt::format("scene: UE {} candidate ({}, {}) is not in front of the array", u, c.x,
                                              c.y));
            }
        }
        const auto& expect = cands[ues[u].location_index];
        if (ues[u].position.x != expect.x || ues[u].position.y != expect.y)
        {
            throw ConfigError(fmt::format("scene: UE {} is not at its indexed location", u));
        }
    }
}

void SceneConfig::validate() const
{
    if (n_ue < 1 || n_loc < 1)
    {
        throw ConfigError("scene: need n_ue >= 1 and n_loc >= 1");
    }
    if (!(r_min_m > 0.0) || !(r_min_m < r_max_m))
    {
        throw ConfigError(fmt::format("scene: annulus radii [{}, {}] invalid", r_min_m, r_max_m));
    }
    if (!(bearing_min > 0.0) || !(bearing_min < bearing_max) || !(bearing_max < std::numbers::pi))
    {
        throw ConfigError(fmt::format("scene: bearing span [{}, {}] must lie inside (0, pi)", bearing_min,
                                      bearing_max));
    }
    if (!(mobility >= 0.0 && mobility <= 1.0))
    {
        throw ConfigError(fmt::format("scene: mobility {} outside [0, 1]", mobility));
    }
}

std::size_t Clock::k_d() const
{
    if (!(rl_step_ms > 0.0) || !(mmt_period_ms >= rl_step_ms))
    {
        throw ConfigError("clock: need 0 < rl_step_ms <= mmt_period_ms");
    }
    return static_cast<std::size_t>(std::floor(mmt_period_ms / rl_step_ms + 1e-9));
}

Scene new_scene(const SceneConfig& config, std::uint64_t seed)
{
    config.validate();
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> bearing(config.bearing_min, config.bearing_max);

    Scene s;
    s.bs_position = config.bs_position;
    s.n_loc = config.n_loc;
    s.location_table.resize(config.n_ue);
    const double r0 = config.r_min_m * config.r_min_m;
    const double r1 = config.r_max_m * config.r_max_m;
    for (UeIndex u = 0; u < config.n_ue; ++u)
    {
        auto& cands = s.location_table[u];
        cands.reserve(config.n_loc);
        for (std::size_t l = 0; l < config.n_loc; ++l)
        {
            const double r = std::sqrt(r0 + unit(rng) * (r1 - r0));
            const double th = bearing(rng);
            cands.push_back({config.bs_position.x + r * std::cos(th), config.bs_position.y + r * std::sin(th)});
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, config.n_loc - 1);
    s.ues.resize(config.n_ue);
    for (UeIndex u = 0; u < config.n_ue; ++u)
    {
        s.ues[u].id = u;
        s.place(u, pick(rng));
    }
    return s;
}

Scene load_scene_csv(const std::filesystem::path& path, Point bs_position)
{
    const auto t = csv::read(path);
    csv::expect_header(t, {"ue_id", "loc_index", "x_m", "y_m"}, path);

    Scene s;
    s.bs_position = bs_position;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const auto line = t.line_numbers[r];
        const auto ue = csv::to_int(t.rows[r][0], path, line);
        const auto loc = csv::to_int(t.rows[r][1], path, line);
        if (ue < 0 || loc < 0)
        {
            throw DataError(fmt::format("{}:{}: negative index", path.string(), line));
        }
        const auto u = static_cast<std::size_t>(ue);
        if (u >= s.location_table.size())
        {
            s.location_table.resize(u + 1);
        }
        auto& cands = s.location_table[u];
        if (static_cast<std::size_t>(loc) != cands.size())
        {
            throw DataError(fmt::format("{}:{}: UE {} locations must be listed in order from 0", path.string(), line,
                                        ue));
        }
        cands.push_back({csv::to_double(t.rows[r][2], path, line), csv::to_double(t.rows[r][3], path, line)});
    }
    if (s.location_table.empty())
    {
        throw DataError(fmt::format("{}: no UEs", path.string()));
    }
    s.n_loc = s.location_table.front().size();
    s.ues.resize(s.location_table.size());
    for (UeIndex u = 0; u < s.ues.size(); ++u)
    {
        if (s.location_table[u].size() != s.n_loc || s.n_loc == 0)
        {
            throw DataError(fmt::format("{}: UE {} has {} locations, expected {}", path.string(), u,
                                        s.location_table[u].size(), s.n_loc));
        }
        s.ues[u].id = u;
        s.place(u, 0);
    }
    try
    {
        s.validate();
    }
    catch (const ConfigError& e)
    {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return s;
}

void write_scene_csv(const Scene& scene, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << "ue_id,loc_index,x_m,y_m\n";
    for (UeIndex u = 0; u < scene.location_table.size(); ++u)
    {
        for (std::size_t l = 0; l < scene.location_table[u].size(); ++l)
        {
            const auto& p = scene.location_table[u][l];
            out << u << ',' << l << ',' << csv::format_double(p.x) << ',' << csv::format_double(p.y) << '\n';
        }
    }
}

void advance_mmt_tick(Scene& scene, Clock& clock, Rng& rng, double mobility)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        if (unit(rng) < mobility)
        {
            std::uniform_int_distribution<std::size_t> pick(0, scene.n_loc - 1);
            scene.place(u, pick(rng));
        }
    }
    ++clock.tick_index;
    clock.step_index = 0;
}

OracleChoice oracle_best_beam(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb, UeIndex u,
                              const Assignment& others)
{
    return FrozenChannel(scene, params, cb).best_beam(u, others);
}

StepOutcome apply_and_measure(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb,
                              const Assignment& assignment)
{
    validate_assignment(assignment, scene.n_ue(), cb);
    return FrozenChannel(scene, params, cb).measure(assignment);
}

FrozenChannel::FrozenChannel(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb)
    : table_(kernels::power_table(scene, params, cb)),
      noise_w_(dbm_to_watts(params.noise_dbm)),
      bandwidth_hz_(params.bandwidth_hz)
{
}

StepOutcome FrozenChannel::measure(const Assignment& assignment) const
{
    return kernels::measure(table_, noise_w_, bandwidth_hz_, assignment);
}

OracleChoice FrozenChannel::best_beam(UeIndex u, const Assignment& others) const
{
    const auto best = kernels::best_response(table_, noise_w_, bandwidth_hz_, others, u);
    Assignment a = others;
    a[u] = best.beam;
    const auto m = measure(a);
    return {best.beam, best.total_bps, m.per_ue_bps[u]};
}

JointOracle FrozenChannel::coordinate_ascent(std::size_t max_sweeps) const
{
    JointOracle out;
    const std::size_t n_ue = table_.n_ue;
    out.assignment.assign(n_ue, 0);
    if (n_ue == 0)
    {
        return out;
    }
    for (UeIndex u = 0; u < n_ue; ++u)
    {
        const auto row = table_.row(u);
        BeamIndex best = 0;
        for (BeamIndex b = 1; b < row.size(); ++b)
        {
            if (row[b] > row[best])
            {
                best = b;
            }
        }
        out.assignment[u] = best;
    }

    for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps)
    {
        bool changed = false;
        for (UeIndex u = 0; u < n_ue; ++u)
        {
            const auto totals = kernels::candidate_totals(table_, noise_w_, bandwidth_hz_, out.assignment, u);
            BeamIndex best = out.assignment[u];
            for (BeamIndex b = 0; b < totals.size(); ++b)
            {
                // Strict improvement over the incumbent guarantees termination.
                if (totals[b] > totals[best])
                {
                    best = b;
                }
            }
            if (best != out.assignment[u])
            {
                out.assignment[u] = best;
                changed = true;
            }
        }
        if (!changed)
        {
            break;
        }
    }
    const auto m = measure(out.assignment);
    out.total_bps = m.total_bps;
    out.se_total = m.se_total;
    return out;
}

JointOracle FrozenChannel::exhaustive() const
{
    const std::size_t n_ue = table_.n_ue;
    const std::size_t n_beams = table_.n_beams;
    double combos = std::pow(static_cast<double>(n_beams), static_cast<double>(n_ue));
    if (combos > 1 << 24)
    {
        throw ConfigError(fmt::format("exhaustive oracle: {}^{} assignments is too many", n_beams, n_ue));
    }
    JointOracle out;
    out.assignment.assign(n_ue, 0);
    if (n_ue == 0)
    {
        return out;
    }
    Assignment a(n_ue, 0);
    double best = -1.0;
    while (true)
    {
        const auto m = measure(a);
        if (m.total_bps > best)
        {
            best = m.total_bps;
            out.assignment = a;
            out.se_total = m.se_total;
        }
        // odometer increment, last UE fastest
        std::size_t pos = n_ue;
        while (pos > 0)
        {
            --pos;
            if (++a[pos] < n_beams)
            {
                break;
            }
            a[pos] = 0;
            if (pos == 0)
            {
                out.total_bps = best;
                out.sweeps = 1;
                return out;
            }
        }
    }
}

JointOracle joint_oracle(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb)
{
    return FrozenChannel(scene, params, cb).coordinate_ascent();
}

} // namespace beamsim
