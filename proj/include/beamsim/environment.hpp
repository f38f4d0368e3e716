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
#include "beamsim/kernels.hpp"
#include "beamsim/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>

namespace beamsim
{

using Rng = std::mt19937_64;

struct SceneConfig
{
    std::size_t n_ue = 5;
    std::size_t n_loc = 5;
    Point bs_position{0.0, 0.0};
    /// Candidate locations are drawn uniformly (by area) from this annular
    /// sector around the base station.
    double r_min_m = 50.0;
    double r_max_m = 500.0;
    double bearing_min = std::numbers::pi / 6.0;
    double bearing_max = 5.0 * std::numbers::pi / 6.0;
    /// Per-tick probability that a UE jumps to a new candidate location.
    double mobility = 0.3;

    void validate() const;
};

/// Two timescales: the group predictor runs once per tick, the agent acts
/// k_d() times inside it.
struct Clock
{
    double mmt_period_ms = 100.0;
    double rl_step_ms = 0.5716;
    std::size_t tick_index = 0;
    std::size_t step_index = 0;

    std::size_t k_d() const;
};

Scene new_scene(const SceneConfig& config, std::uint64_t seed);

/// Reads `ue_id,loc_index,x_m,y_m`. UE ids and location indices must be dense
/// from 0, and every UE needs the same number of candidates. UEs start at
/// location 0.
Scene load_scene_csv(const std::filesystem::path& path, Point bs_position = {});
void write_scene_csv(const Scene& scene, const std::filesystem::path& path);

/// Start of a new predictor tick: each UE independently jumps with
/// probability `mobility` to a uniformly drawn candidate (possibly its
/// current one).
void advance_mmt_tick(Scene& scene, Clock& clock, Rng& rng, double mobility);

struct OracleChoice
{
    BeamIndex beam = 0;
    double total_bps = 0.0;
    /// Rate of UE u itself under the chosen beam.
    double ue_bps = 0.0;
};

/// Exhaustive search over every beam for UE `u` with the other UEs fixed by
/// `others` (others[u] is ignored). Ties go to the lowest beam index.
OracleChoice oracle_best_beam(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb, UeIndex u,
                              const Assignment& others);

struct JointOracle
{
    Assignment assignment;
    double total_bps = 0.0;
    double se_total = 0.0;
    std::size_t sweeps = 0;
};

using StepOutcome = Throughput;

StepOutcome apply_and_measure(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb,
                              const Assignment& assignment);

/// The channel seen during one predictor tick: the scene is frozen, so every
/// measurement is a lookup into a precomputed power table.
class FrozenChannel
{
public:
    FrozenChannel(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

    std::size_t n_ue() const noexcept { return table_.n_ue; }
    std::size_t n_beams() const noexcept { return table_.n_beams; }
    const PowerTable& table() const noexcept { return table_; }

    StepOutcome measure(const Assignment& assignment) const;
    OracleChoice best_beam(UeIndex u, const Assignment& others) const;

    /// Cyclic per-UE best response from the max-gain assignment until no UE
    /// can strictly improve the total. The result is a fixed point of
    /// best_beam, not necessarily the joint optimum.
    JointOracle coordinate_ascent(std::size_t max_sweeps = 100) const;

    /// Exact joint search over n_beams^n_ue assignments. Only for tiny scenes.
    JointOracle exhaustive() const;

private:
    PowerTable table_;
    double noise_w_ = 0.0;
    double bandwidth_hz_ = 0.0;
};

JointOracle joint_oracle(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

} // namespace beamsim
