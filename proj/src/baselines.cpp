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

#include "beamsim/baselines.hpp"

#include "beamsim/errors.hpp"

#include <chrono>

namespace beamsim
{

QTable make_rl_only_table(std::size_t n_ue, std::size_t n_loc, const BeamCodebook& cb, double alpha, double gamma)
{
    return QTable(n_ue, n_loc, 1, cb.n_beams(), alpha, gamma);
}

QTable make_two_step_table(std::size_t n_ue, std::size_t n_loc, const BeamCodebook& cb, double alpha, double gamma)
{
    return QTable(n_ue, n_loc, cb.n_groups(), cb.beams_per_group(), alpha, gamma);
}

EpisodeLog run_rl_only(const EpisodeContext& ctx, const TickView& tick, QTable& q, RewardSpec& spec, Rng& rng)
{
    if (q.n_groups() != 1 || q.n_actions() != ctx.cb->n_beams())
    {
        throw ConfigError("rl-only: Q-table must be (ue, loc) x n_beams");
    }
    detail::ActionWindow window;
    window.n_actions = ctx.cb->n_beams();
    window.base.assign(ctx.scene->n_ue(), 0);
    window.group.assign(ctx.scene->n_ue(), 0);
    return detail::run_q_episode(ctx, tick, window, q, spec, rng);
}

EpisodeLog run_mmt_only(const EpisodeContext& ctx, const TickView& tick, BeamPredictor& predictor, RewardSpec& spec,
                        BeamPrediction* prediction_out)
{
    const Scene& scene = *ctx.scene;
    auto prediction = predictor.predict(scene, OracleContext{ctx.tick, tick.oracle.assignment});
    if (prediction.top.size() != scene.n_ue())
    {
        throw DataError("mmt-only: prediction does not cover every UE");
    }
    spec.resolve(tick.oracle.total_bps);

    EpisodeLog log;
    log.episode = ctx.episode;
    log.seed = ctx.seed;
    log.tick = ctx.tick;
    log.epsilon = 0.0;
    log.oracle_total_bps = tick.oracle.total_bps;
    log.r_th = spec.r_th.value_or(0.0);

    const auto start = std::chrono::steady_clock::now();
    Assignment assignment(prediction.top.begin(), prediction.top.end());
    const auto outcome = tick.channel.measure(assignment);
    const double r = reward_of(outcome, spec);
    const std::size_t n_ue = scene.n_ue();
    log.steps.reserve(ctx.k_d);
    for (std::size_t step = 0; n_ue > 0 && step < ctx.k_d; ++step)
    {
        const UeIndex u = step % n_ue;
        StepRecord rec;
        rec.tick = ctx.tick;
        rec.step = step;
        rec.ue = u;
        rec.state = {u, scene.ues[u].location_index, 0};
        rec.action = assignment[u];
        rec.beam = assignment[u];
        rec.reward = r;
        rec.total_bps = outcome.total_bps;
        rec.se_total = outcome.se_total;
        if (ctx.record_sinr)
        {
            rec.sinr = outcome.per_ue_sinr;
        }
        log.steps.push_back(std::move(rec));
    }
    log.step_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (prediction_out)
    {
        *prediction_out = std::move(prediction);
    }
    return log;
}

} // namespace beamsim
