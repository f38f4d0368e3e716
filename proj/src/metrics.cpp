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

#include "beamsim/metrics.hpp"

#include "beamsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace beamsim
{

double cumulative_reward(std::span<const double> rewards, double gamma)
{
    if (rewards.empty())
    {
        throw DataError("cumulative reward of an empty log");
    }
    double total = 0.0;
    double discount = 1.0;
    for (double r : rewards)
    {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

double cumulative_reward(const EpisodeLog& log, double gamma)
{
    std::vector<double> rewards(log.steps.size());
    std::transform(log.steps.begin(), log.steps.end(), rewards.begin(), [](const StepRecord& s) { return s.reward; });
    return cumulative_reward(rewards, gamma);
}

double top_k_accuracy(std::span<const std::vector<BeamIndex>> rankings, std::span<const BeamIndex> oracle_beams,
                      std::size_t k)
{
    if (rankings.size() != oracle_beams.size())
    {
        throw DataError(fmt::format("top-k: {} rankings but {} oracle labels", rankings.size(), oracle_beams.size()));
    }
    if (rankings.empty())
    {
        throw DataError("top-k: no samples");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i)
    {
        const auto& r = rankings[i];
        if (k < 1 || k > r.size())
        {
            throw DataError(fmt::format("top-k: k = {} outside [1, {}]", k, r.size()));
        }
        if (std::find(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), oracle_beams[i]) !=
            r.begin() + static_cast<std::ptrdiff_t>(k))
        {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

SeriesStats aggregate_runs(std::span<const std::vector<double>> runs)
{
    if (runs.empty())
    {
        throw DataError("aggregate: no runs");
    }
    const std::size_t len = runs.front().size();
    for (const auto& r : runs)
    {
        if (r.size() != len)
        {
            throw DataError(fmt::format("aggregate: ragged runs ({} vs {} points)", r.size(), len));
        }
    }
    SeriesStats out{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
    const double n = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < len; ++i)
    {
        double sum = 0.0;
        for (const auto& r : runs)
        {
            sum += r[i];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : runs)
        {
            ss += (r[i] - mean) * (r[i] - mean);
        }
        out.mean[i] = mean;
        out.std[i] = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    return out;
}

double fitted_slope(std::span<const double> y, std::size_t first, std::size_t last)
{
    if (last > y.size() || last < first + 2)
    {
        throw DataError(fmt::format("slope: window [{}, {}) invalid for {} points", first, last, y.size()));
    }
    const double n = static_cast<double>(last - first);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = first; i < last; ++i)
    {
        sx += static_cast<double>(i);
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = first; i < last; ++i)
    {
        const double dx = static_cast<double>(i) - mx;
        sxy += dx * (y[i] - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

std::vector<std::size_t> q_ranking(const QTable& q, const AgentState& s)
{
    const auto row = q.row(s);
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    return order;
}

std::vector<BeamIndex> two_step_ranking(const QTable& q, const AgentState& s, const GroupPrediction& prediction,
                                        UeIndex u, const BeamCodebook& cb)
{
    std::vector<BeamIndex> out;
    out.reserve(cb.n_beams());
    const GroupIndex predicted = prediction.top.at(u);
    const BeamIndex base = cb.group_base(predicted);
    for (std::size_t a : q_ranking(q, s))
    {
        out.push_back(base + a);
    }
    for (GroupIndex g : prediction.ranking(u))
    {
        if (g == predicted)
        {
            continue;
        }
        for (BeamIndex b : cb.beams_in_group(g))
        {
            out.push_back(b);
        }
    }
    return out;
}

} // namespace beamsim
