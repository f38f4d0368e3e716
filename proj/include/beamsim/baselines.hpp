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

namespace beamsim
{

/// Flat Q-learning over the whole codebook: state (ue, loc), one action per
/// beam. `q` must be shaped (n_ue, n_loc, 1, n_beams).
EpisodeLog run_rl_only(const EpisodeContext& ctx, const TickView& tick, QTable& q, RewardSpec& spec, Rng& rng);

/// Prediction only: every UE holds its predicted beam for the whole tick.
/// Rewards are evaluated against `spec` for reporting; nothing is learned.
EpisodeLog run_mmt_only(const EpisodeContext& ctx, const TickView& tick, BeamPredictor& predictor, RewardSpec& spec,
                        BeamPrediction* prediction_out = nullptr);

QTable make_rl_only_table(std::size_t n_ue, std::size_t n_loc, const BeamCodebook& cb, double alpha, double gamma);
QTable make_two_step_table(std::size_t n_ue, std::size_t n_loc, const BeamCodebook& cb, double alpha, double gamma);

} // namespace beamsim
