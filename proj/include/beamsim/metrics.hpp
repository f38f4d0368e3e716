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

#include <span>
#include <vector>

namespace beamsim
{

/// Discounted return from the first step: sum_k gamma^k r_k over the log.
/// DataError on an empty log.
double cumulative_reward(const EpisodeLog& log, double gamma);
double cumulative_reward(std::span<const double> rewards, double gamma);

/// Fraction of samples whose oracle beam is among the first k entries of
/// the sample's ranking.
double top_k_accuracy(std::span<const std::vector<BeamIndex>> rankings, std::span<const BeamIndex> oracle_beams,
                      std::size_t k);

struct SeriesStats
{
    std::vector<double> mean;
    /// Sample standard deviation (n - 1); zero for a single run.
    std::vector<double> std;
};

/// Element-wise mean and spread across runs. DataError on ragged input.
SeriesStats aggregate_runs(std::span<const std::vector<double>> runs);

/// Least-squares slope of `y` against its index over [first, last).
double fitted_slope(std::span<const double> y, std::size_t first, std::size_t last);

/// Full ranking for the two-step method: the predicted group's beams by
/// descending Q (lowest index on ties), then the other groups in predictor
/// score order with their beams in angle order.
std::vector<BeamIndex> two_step_ranking(const QTable& q, const AgentState& s, const GroupPrediction& prediction,
                                        UeIndex u, const BeamCodebook& cb);

/// All actions of a row by descending Q, lowest index on ties.
std::vector<std::size_t> q_ranking(const QTable& q, const AgentState& s);

} // namespace beamsim
