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

#include "beamsim/agent.hpp"
#include "beamsim/baselines.hpp"
#include "beamsim/codebook.hpp"
#include "beamsim/environment.hpp"
#include "beamsim/metrics.hpp"
#include "beamsim/predictor.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace beamsim
{

inline constexpr const char* kVersion = "beamsim 0.1.0";

enum class Method
{
    kMmtRl,
    kRlOnly,
    kMmtOnly,
};

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Every knob of an experiment. Defaults reproduce the reference setup, so an
/// empty JSON object is a complete configuration.
struct ExperimentConfig
{
    std::size_t n_beams = 64;
    std::size_t n_groups = 8;
    AngleSpan angle_span{0.0, 3.14159265358979323846};
    std::string codebook_csv;

    ChannelParams channel;

    SceneConfig scene;
    std::string scene_csv;

    double mmt_period_ms = 100.0;
    double rl_step_ms = 0.5716;

    double alpha = 0.001;
    double gamma = 0.9;
    double eps_start = 0.9;
    double eps_end = 0.6;
    /// Unset: half the episode budget.
    std::optional<std::size_t> decay_horizon;
    RewardSpec reward;

    /// Group predictor for the two-step method.
    std::string predictor = "noisy";
    double predictor_p = 0.595;
    std::string predictions_csv;

    /// Beam predictor for the prediction-only baseline. Unset p: the accuracy
    /// whose implied group accuracy equals predictor_p.
    std::string beam_predictor = "noisy";
    std::optional<double> beam_predictor_p;
    std::string beam_predictions_csv;

    Method method = Method::kMmtRl;
    std::size_t episodes = 200;
    std::size_t eval_ticks = 50;
    std::size_t rounds = 10;
    std::uint64_t seed = 1;
    /// 0: as many as OpenMP offers (capped by BEAMSIM_WORKERS).
    std::size_t workers = 0;

    /// Throws ConfigError for any inconsistent setting.
    void validate() const;

    BeamCodebook codebook() const;
    EpsilonSchedule epsilon_schedule() const;
    std::size_t k_d() const;
    double resolved_beam_p(const BeamCodebook& cb) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Strict: unknown keys and wrong types are ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Accepts a plain config or a run manifest (uses its "config" member).
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t round_seed(std::uint64_t seed, std::size_t round);

struct RoundResult
{
    std::size_t round = 0;
    std::uint64_t seed = 0;
    std::vector<double> cum_reward;
    std::vector<double> train_se;
    /// Mean system SE of the greedy (or predicted) assignment over the
    /// evaluation ticks.
    double eval_se = 0.0;
    std::vector<std::vector<BeamIndex>> rankings;
    std::vector<BeamIndex> oracle_labels;
    std::size_t group_hits = 0;
    std::size_t group_samples = 0;
    double step_seconds = 0.0;
    std::size_t steps = 0;
    std::vector<EpisodeLog> logs;
    /// Final table for learning methods.
    std::optional<QTable> q;
};

/// Trains for `episodes` ticks, then evaluates for `eval_ticks` ticks. The
/// scene trajectory and prediction noise depend only on (seed, round), so
/// every method sees the same world.
RoundResult run_round(const ExperimentConfig& config, Method method, std::size_t round, bool keep_logs = false);

/// All rounds, run in parallel; results are ordered by round.
std::vector<RoundResult> run_rounds(const ExperimentConfig& config, Method method, bool keep_logs = false);

std::size_t worker_count(const ExperimentConfig& config);

struct RunSummary
{
    SeriesStats reward_curve;
    std::vector<RoundResult> rounds;
};

/// `reward_curve.csv`, `rounds.csv`, `episode_logs/round_NN.csv` and
/// `manifest.json` under out_dir.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          bool write_logs = true);

struct SweepRow
{
    std::size_t n_ue = 0;
    double se_mmt_rl = 0.0;
    double se_mmt = 0.0;
    double se_rl = 0.0;
    std::vector<double> rounds_mmt_rl;
    std::vector<double> rounds_mmt;
    std::vector<double> rounds_rl;
};

/// `se_vs_users.csv` and `se_vs_users_rounds.csv`.
std::vector<SweepRow> sweep_users(const ExperimentConfig& config, const std::vector<std::size_t>& n_ues,
                                  const std::filesystem::path& out_dir);

struct AccuracyRow
{
    std::size_t k = 0;
    double acc_mmt_rl = 0.0;
    double acc_mmt = 0.0;
    double acc_rl = 0.0;
};

struct AccuracyReport
{
    std::vector<AccuracyRow> rows;
    double step_ms_mmt_rl = 0.0;
    double step_ms_rl = 0.0;
    double group_top1 = 0.0;
};

/// `topk.csv` for k = 1..k_max.
AccuracyReport accuracy(const ExperimentConfig& config, std::size_t k_max, const std::filesystem::path& out_dir);

/// Oracle group labels `tick,ue_id,group` and the UE trajectory
/// `tick,ue_id,loc_index,x_m,y_m` for round 0, plus the scene and codebook
/// tables. These feed external predictor training.
void calibrate(const ExperimentConfig& config, std::size_t ticks, const std::filesystem::path& out_dir);

void write_manifest(const ExperimentConfig& config, const std::string& command,
                    const std::filesystem::path& out_dir, const nlohmann::json& extra = {});

} // namespace beamsim
