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

#include "beamsim/agent.hpp"

#include "beamsim/csv.hpp"
#include "beamsim/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>

namespace beamsim
{

QTable::QTable(std::size_t n_ue, std::size_t n_loc, std::size_t n_groups, std::size_t n_actions, double alpha,
               double gamma)
    : n_ue_(n_ue), n_loc_(n_loc), n_groups_(n_groups), n_actions_(n_actions), alpha_(alpha), gamma_(gamma)
{
    if (n_ue == 0 || n_loc == 0 || n_groups == 0 || n_actions == 0)
    {
        throw ConfigError("q-table: every dimension must be at least 1");
    }
    if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma >= 0.0 && gamma < 1.0))
    {
        throw ConfigError(fmt::format("q-table: need 0 < alpha <= 1 and 0 <= gamma < 1 (got {}, {})", alpha, gamma));
    }
    values_.assign(n_ue * n_loc * n_groups * n_actions, 0.0);
}

std::size_t QTable::row_offset(const AgentState& s) const
{
    if (s.ue >= n_ue_ || s.loc >= n_loc_ || s.group >= n_groups_)
    {
        throw IndexError(fmt::format("state (ue {}, loc {}, group {}) outside table ({}, {}, {})", s.ue, s.loc,
                                     s.group, n_ue_, n_loc_, n_groups_));
    }
    return ((s.ue * n_loc_ + s.loc) * n_groups_ + s.group) * n_actions_;
}

std::span<const double> QTable::row(const AgentState& s) const
{
    return std::span<const double>(values_).subspan(row_offset(s), n_actions_);
}

double QTable::at(const AgentState& s, std::size_t action) const
{
    if (action >= n_actions_)
    {
        throw IndexError(fmt::format("action {} outside [0, {})", action, n_actions_));
    }
    return values_[row_offset(s) + action];
}

void QTable::set(const AgentState& s, std::size_t action, double value)
{
    if (action >= n_actions_)
    {
        throw IndexError(fmt::format("action {} outside [0, {})", action, n_actions_));
    }
    values_[row_offset(s) + action] = value;
}

std::size_t QTable::greedy(const AgentState& s) const
{
    const auto r = row(s);
    return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

double QTable::max_value(const AgentState& s) const
{
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

void write_qtable_csv(const QTable& q, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << "ue,loc,group,action,value\n";
    for (std::size_t u = 0; u < q.n_ue(); ++u)
    {
        for (std::size_t l = 0; l < q.n_loc(); ++l)
        {
            for (std::size_t g = 0; g < q.n_groups(); ++g)
            {
                const auto r = q.row({u, l, g});
                for (std::size_t a = 0; a < r.size(); ++a)
                {
                    out << u << ',' << l << ',' << g << ',' << a << ',' << csv::format_double(r[a]) << '\n';
                }
            }
        }
    }
}

void read_qtable_csv(QTable& q, const std::filesystem::path& path)
{
    const auto t = csv::read(path);
    csv::expect_header(t, {"ue", "loc", "group", "action", "value"}, path);
    if (t.rows.size() != q.size())
    {
        throw DataError(fmt::format("{}: {} entries, table has {}", path.string(), t.rows.size(), q.size()));
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const auto line = t.line_numbers[r];
        const auto idx = [&](std::size_t c) {
            const auto v = csv::to_int(t.rows[r][c], path, line);
            if (v < 0)
            {
                throw DataError(fmt::format("{}:{}: negative index", path.string(), line));
            }
            return static_cast<std::size_t>(v);
        };
        const double value = csv::to_double(t.rows[r][4], path, line);
        if (!std::isfinite(value))
        {
            throw DataError(fmt::format("{}:{}: non-finite Q-value", path.string(), line));
        }
        try
        {
            q.set({idx(0), idx(1), idx(2)}, idx(3), value);
        }
        catch (const IndexError& e)
        {
            throw DataError(fmt::format("{}:{}: {}", path.string(), line, e.what()));
        }
    }
}

void write_qtable_binary(const QTable& q, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    const std::uint64_t dims[4] = {q.n_ue(), q.n_loc(), q.n_groups(), q.n_actions()};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(q.values().data()),
              static_cast<std::streamsize>(q.values().size() * sizeof(double)));
}

void read_qtable_binary(QTable& q, const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError(fmt::format("cannot open '{}'", path.string()));
    }
    std::uint64_t dims[4] = {};
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] != q.n_ue() || dims[1] != q.n_loc() || dims[2] != q.n_groups() || dims[3] != q.n_actions())
    {
        throw DataError(fmt::format("{}: snapshot dimensions do not match the table", path.string()));
    }
    std::vector<double> values(q.size());
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in)
    {
        throw DataError(fmt::format("{}: truncated snapshot", path.string()));
    }
    std::size_t i = 0;
    for (std::size_t u = 0; u < q.n_ue(); ++u)
        for (std::size_t l = 0; l < q.n_loc(); ++l)
            for (std::size_t g = 0; g < q.n_groups(); ++g)
                for (std::size_t a = 0; a < q.n_actions(); ++a)
                    q.set({u, l, g}, a, values[i++]);
}

void RewardSpec::validate() const
{
    if (!(reward_hit > reward_miss))
    {
        throw ConfigError("reward: reward_hit must exceed reward_miss");
    }
    if (mode == ThresholdMode::kFixed && (!r_th || !std::isfinite(*r_th)))
    {
        throw ConfigError("reward: fixed mode needs a finite r_th");
    }
    if (mode == ThresholdMode::kAuto && !(auto_factor > 0.0))
    {
        throw ConfigError("reward: auto_factor must be positive");
    }
}

void RewardSpec::resolve(double oracle_total_bps)
{
    if (mode == ThresholdMode::kAuto)
    {
        r_th = auto_factor * oracle_total_bps;
    }
}

double reward_of(double total_bps, const RewardSpec& spec)
{
    if (!spec.r_th)
    {
        throw StateError("reward: threshold not resolved for this tick");
    }
    return total_bps > *spec.r_th ? spec.reward_hit : spec.reward_miss;
}

double reward_of(const StepOutcome& outcome, const RewardSpec& spec)
{
    return reward_of(outcome.total_bps, spec);
}

void EpsilonSchedule::validate() const
{
    if (!(0.0 <= eps_end && eps_end <= eps_start && eps_start <= 1.0))
    {
        throw ConfigError(fmt::format("epsilon: need 0 <= end <= start <= 1 (got {}, {})", eps_start, eps_end));
    }
}

double epsilon_at(const EpsilonSchedule& schedule, std::size_t episode)
{
    if (episode >= schedule.decay_horizon)
    {
        return schedule.eps_end;
    }
    const double frac = static_cast<double>(episode) / static_cast<double>(schedule.decay_horizon);
    return schedule.eps_start + (schedule.eps_end - schedule.eps_start) * frac;
}

std::size_t select_action(const QTable& q, const AgentState& s, double eps, Rng& rng)
{
    const std::size_t greedy = q.greedy(s);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps)
    {
        std::uniform_int_distribution<std::size_t> pick(0, q.n_actions() - 1);
        return pick(rng);
    }
    return greedy;
}

void q_update(QTable& q, const AgentState& s, std::size_t action, double reward, const AgentState& next)
{
    if (!std::isfinite(reward))
    {
        throw NumericError(fmt::format("q-update: non-finite reward {}", reward));
    }
    const double old = q.at(s, action);
    const double target = reward + q.gamma() * q.max_value(next);
    q.set(s, action, old + q.alpha() * (target - old));
}

TickView prepare_tick(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb)
{
    FrozenChannel channel(scene, params, cb);
    auto oracle = channel.coordinate_ascent();
    return {std::move(channel), std::move(oracle)};
}

namespace detail
{

EpisodeLog run_q_episode(const EpisodeContext& ctx, const TickView& tick, const ActionWindow& window, QTable& q,
                         RewardSpec& spec, Rng& rng)
{
    const Scene& scene = *ctx.scene;
    const std::size_t n_ue = scene.n_ue();
    if (window.n_actions != q.n_actions() || window.base.size() != n_ue || n_ue > q.n_ue())
    {
        throw ConfigError("episode: action window and Q-table dimensions disagree");
    }

    spec.resolve(tick.oracle.total_bps);

    EpisodeLog log;
    log.episode = ctx.episode;
    log.seed = ctx.seed;
    log.tick = ctx.tick;
    log.epsilon = ctx.epsilon;
    log.oracle_total_bps = tick.oracle.total_bps;
    log.r_th = spec.r_th.value_or(0.0);
    if (n_ue == 0)
    {
        return log;
    }
    log.steps.reserve(ctx.k_d);

    std::vector<AgentState> states(n_ue);
    Assignment assignment(n_ue);
    for (UeIndex u = 0; u < n_ue; ++u)
    {
        states[u] = {u, scene.ues[u].location_index, window.group[u]};
        assignment[u] = window.base[u] + q.greedy(states[u]);
    }

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t step = 0; step < ctx.k_d; ++step)
    {
        const UeIndex u = step % n_ue;
        const AgentState& s = states[u];
        const std::size_t action = select_action(q, s, ctx.epsilon, rng);
        assignment[u] = window.base[u] + action;
        auto outcome = tick.channel.measure(assignment);
        const double r = reward_of(outcome, spec);
        // The next observation is the state of the UE acting next.
        const AgentState& next = states[(step + 1) % n_ue];
        if (ctx.learn)
        {
            q_update(q, s, action, r, next);
        }

        StepRecord rec;
        rec.tick = log.tick;
        rec.step = step;
        rec.ue = u;
        rec.state = s;
        rec.action = action;
        rec.beam = assignment[u];
        rec.reward = r;
        rec.total_bps = outcome.total_bps;
        rec.se_total = outcome.se_total;
        if (ctx.record_sinr)
        {
            rec.sinr = std::move(outcome.per_ue_sinr);
        }
        log.steps.push_back(std::move(rec));
    }
    log.step_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
}

} // namespace detail

EpisodeLog run_episode(const EpisodeContext& ctx, const TickView& tick, GroupPredictor& predictor, QTable& q,
                       RewardSpec& spec, Rng& rng, GroupPrediction* prediction_out)
{
    const Scene& scene = *ctx.scene;
    const BeamCodebook& cb = *ctx.cb;
    if (q.n_actions() != cb.beams_per_group() || q.n_groups() != cb.n_groups())
    {
        throw ConfigError("episode: Q-table must have one row per group and one action per beam in a group");
    }
    const auto prediction =
        predictor.predict(scene, OracleContext{ctx.tick, tick.oracle.assignment});
    if (prediction.top.size() != scene.n_ue())
    {
        throw DataError("episode: prediction does not cover every UE");
    }

    detail::ActionWindow window;
    window.n_actions = cb.beams_per_group();
    window.base.resize(scene.n_ue());
    window.group.resize(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        window.group[u] = prediction.top[u];
        window.base[u] = cb.group_base(prediction.top[u]);
    }
    auto log = detail::run_q_episode(ctx, tick, window, q, spec, rng);
    if (prediction_out)
    {
        *prediction_out = prediction;
    }
    return log;
}

} // namespace beamsim
