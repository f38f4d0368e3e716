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

#include "beamsim/codebook.hpp"
#include "beamsim/environment.hpp"
#include "beamsim/predictor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace beamsim
{

/// Factored agent state: one UE, where it is, and the group it was given.
/// The flat baseline uses a single group (group == 0).
struct AgentState
{
    UeIndex ue = 0;
    std::size_t loc = 0;
    GroupIndex group = 0;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Dense Q-values over (ue, loc, group) x action, all starting at zero.
class QTable
{
public:
    QTable(std::size_t n_ue, std::size_t n_loc, std::size_t n_groups, std::size_t n_actions, double alpha = 0.001,
           double gamma = 0.9);

    std::size_t n_ue() const noexcept { return n_ue_; }
    std::size_t n_loc() const noexcept { return n_loc_; }
    std::size_t n_groups() const noexcept { return n_groups_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    std::size_t size() const noexcept { return values_.size(); }
    double alpha() const noexcept { return alpha_; }
    double gamma() const noexcept { return gamma_; }

    /// Throws IndexError for out-of-range components.
    std::size_t row_offset(const AgentState& s) const;
    std::span<const double> row(const AgentState& s) const;
    double at(const AgentState& s, std::size_t action) const;
    void set(const AgentState& s, std::size_t action, double value);

    /// Argmax of the row; lowest action on ties.
    std::size_t greedy(const AgentState& s) const;
    double max_value(const AgentState& s) const;

    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t n_ue_, n_loc_, n_groups_, n_actions_;
    double alpha_, gamma_;
    std::vector<double> values_;
};

/// `ue,loc,group,action,value` with full double precision.
void write_qtable_csv(const QTable& q, const std::filesystem::path& path);
/// Fills `q` from a snapshot; the dimensions must match.
void read_qtable_csv(QTable& q, const std::filesystem::path& path);
/// Raw little-endian dump: 4 x u64 dimensions then the values.
void write_qtable_binary(const QTable& q, const std::filesystem::path& path);
void read_qtable_binary(QTable& q, const std::filesystem::path& path);

enum class ThresholdMode
{
    kFixed,
    /// r_th = auto_factor x joint-oracle throughput, recomputed every tick.
    kAuto,
};

struct RewardSpec
{
    ThresholdMode mode = ThresholdMode::kAuto;
    double auto_factor = 0.8;
    /// Fixed threshold in bits/s, or the value resolved for the current tick.
    std::optional<double> r_th;
    double reward_hit = 1.0;
    double reward_miss = -1.0;

    void validate() const;
    /// Sets r_th for a tick in auto mode; no-op in fixed mode.
    void resolve(double oracle_total_bps);
};

double reward_of(const StepOutcome& outcome, const RewardSpec& spec);
double reward_of(double total_bps, const RewardSpec& spec);

struct EpsilonSchedule
{
    double eps_start = 0.9;
    double eps_end = 0.6;
    std::size_t decay_horizon = 100;

    void validate() const;
};

/// Linear from eps_start to eps_end over [0, decay_horizon], then flat.
double epsilon_at(const EpsilonSchedule& schedule, std::size_t episode);

std::size_t select_action(const QTable& q, const AgentState& s, double eps, Rng& rng);

/// One-cell temporal-difference update. NumericError on a non-finite reward.
void q_update(QTable& q, const AgentState& s, std::size_t action, double reward, const AgentState& next);

struct StepRecord
{
    std::size_t tick = 0;
    std::size_t step = 0;
    UeIndex ue = 0;
    AgentState state;
    std::size_t action = 0;
    BeamIndex beam = 0;
    double reward = 0.0;
    double total_bps = 0.0;
    double se_total = 0.0;
    std::vector<double> sinr;
};

struct EpisodeLog
{
    std::size_t episode = 0;
    std::uint64_t seed = 0;
    std::size_t tick = 0;
    double epsilon = 0.0;
    double r_th = 0.0;
    double oracle_total_bps = 0.0;
    /// Wall time of the k_d agent steps, excluding per-tick setup.
    double step_seconds = 0.0;
    std::vector<StepRecord> steps;
};

/// Everything one agent episode (= one predictor tick) needs. The scene is
/// frozen for the episode.
struct EpisodeContext
{
    const Scene* scene = nullptr;
    const ChannelParams* params = nullptr;
    const BeamCodebook* cb = nullptr;
    std::size_t k_d = 174;
    std::size_t episode = 0;
    /// Predictor tick; differs from `episode` during evaluation.
    std::size_t tick = 0;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    /// Set to false to act without updating the table.
    bool learn = true;
    /// Keep per-UE SINR vectors in the step records.
    bool record_sinr = true;
};

/// Per-tick products of the environment shared by all methods.
struct TickView
{
    FrozenChannel channel;
    JointOracle oracle;
};

TickView prepare_tick(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

/// One tick of the two-step method: the predictor is queried once, then each
/// of k_d steps lets one UE (round-robin) pick a beam inside its predicted
/// group, measures the system, and updates the table.
EpisodeLog run_episode(const EpisodeContext& ctx, const TickView& tick, GroupPredictor& predictor, QTable& q,
                       RewardSpec& spec, Rng& rng, GroupPrediction* prediction_out = nullptr);

namespace detail
{

/// Maps a UE to the window of beams it may choose from in this tick.
struct ActionWindow
{
    std::vector<BeamIndex> base;
    std::vector<GroupIndex> group;
    std::size_t n_actions = 0;
};

EpisodeLog run_q_episode(const EpisodeContext& ctx, const TickView& tick, const ActionWindow& window, QTable& q,
                         RewardSpec& spec, Rng& rng);

} // namespace detail

} // namespace beamsim
