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
#include "beamsim/baselines.hpp"
#include "beamsim/errors.hpp"
#include "beamsim/metrics.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace beamsim;

namespace
{

struct World
{
    BeamCodebook cb = testing::default_codebook();
    ChannelParams params;
    Scene scene;

    EpisodeContext ctx(std::size_t episode, double eps) const
    {
        EpisodeContext c;
        c.scene = &scene;
        c.params = &params;
        c.cb = &cb;
        c.episode = episode;
        c.tick = episode;
        c.epsilon = eps;
        return c;
    }
};

World five_ue_world(std::uint64_t seed)
{
    World w;
    SceneConfig sc;
    w.scene = new_scene(sc, seed);
    return w;
}

World lone_ue_world(std::uint64_t seed)
{
    World w;
    SceneConfig sc;
    sc.n_ue = 1;
    sc.n_loc = 1;
    w.scene = new_scene(sc, seed);
    return w;
}

} // namespace

TEST_CASE("episode mechanics")
{
    auto w = five_ue_world(3);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    auto q = make_two_step_table(5, 5, w.cb, 0.001, 0.9);
    CHECK(q.n_actions() == 8);
    CHECK(q.n_groups() == 8);
    NoisyOraclePredictor pred(w.cb, 0.595, 5);
    RewardSpec spec;
    Rng rng(1);
    GroupPrediction prediction;
    const auto log = run_episode(w.ctx(0, 0.9), tick, pred, q, spec, rng, &prediction);

    REQUIRE(log.steps.size() == 174);
    CHECK(log.r_th == doctest::Approx(0.8 * tick.oracle.total_bps));
    for (std::size_t k = 0; k < log.steps.size(); ++k)
    {
        const auto& s = log.steps[k];
        CHECK(s.step == k);
        CHECK(s.ue == k % 5);
        CHECK(s.action < 8);
        CHECK(s.state.group == prediction.top[s.ue]);
        CHECK(w.cb.group_of(s.beam) == prediction.top[s.ue]);
        CHECK(s.beam == w.cb.group_base(s.state.group) + s.action);
        CHECK(s.state.loc == w.scene.ues[s.ue].location_index);
        CHECK((s.reward == 1.0 || s.reward == -1.0));
        CHECK(s.reward == (s.total_bps > log.r_th ? 1.0 : -1.0));
        CHECK(s.sinr.size() == 5);
    }
}

TEST_CASE("episodes are deterministic")
{
    auto w = five_ue_world(4);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    const auto go = [&] {
        auto q = make_two_step_table(5, 5, w.cb, 0.001, 0.9);
        NoisyOraclePredictor pred(w.cb, 0.6, 2);
        RewardSpec spec;
        Rng rng(9);
        std::vector<EpisodeLog> logs;
        for (std::size_t e = 0; e < 3; ++e)
            logs.push_back(run_episode(w.ctx(e, 0.8), tick, pred, q, spec, rng));
        return std::make_pair(logs, q);
    };
    const auto [a, qa] = go();
    const auto [b, qb] = go();
    CHECK(qa == qb);
    for (std::size_t e = 0; e < 3; ++e)
    {
        for (std::size_t k = 0; k < 174; ++k)
        {
            CHECK(a[e].steps[k].action == b[e].steps[k].action);
            CHECK(a[e].steps[k].reward == b[e].steps[k].reward);
            CHECK(a[e].steps[k].total_bps == b[e].steps[k].total_bps);
        }
    }
}

TEST_CASE("the table after an episode equals a replay of its log")
{
    auto w = five_ue_world(6);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    QTable q(5, 5, 8, 8, 0.3, 0.9);
    OracleGroupPredictor pred(w.cb);
    RewardSpec spec;
    Rng rng(4);
    std::vector<EpisodeLog> logs;
    for (std::size_t e = 0; e < 4; ++e)
        logs.push_back(run_episode(w.ctx(e, 0.7), tick, pred, q, spec, rng));

    std::vector<double> shadow(q.size(), 0.0);
    const auto row = [](const AgentState& s) { return ((s.ue * 5 + s.loc) * 8 + s.group) * 8; };
    for (const auto& log : logs)
    {
        for (std::size_t k = 0; k < log.steps.size(); ++k)
        {
            const auto& st = log.steps[k];
            // The next observation is the state of the UE acting next, held fixed within a tick.
            const AgentState& n = log.steps[(k + 1) % 5].state;
            double best = shadow[row(n)];
            for (std::size_t a = 1; a < 8; ++a)
                best = std::max(best, shadow[row(n) + a]);
            double& cell = shadow[row(st.state) + st.action];
            cell = cell + 0.3 * (st.reward + 0.9 * best - cell);
        }
    }
    const auto v = q.values();
    for (std::size_t i = 0; i < shadow.size(); ++i)
    {
        CHECK(v[i] == shadow[i]);
    }
}

TEST_CASE("pure exploitation of a fixed table repeats the same actions")
{
    auto w = five_ue_world(7);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    auto q = make_two_step_table(5, 5, w.cb, 0.001, 0.9);
    OracleGroupPredictor pred(w.cb);
    RewardSpec spec;
    Rng rng(2);
    for (std::size_t e = 0; e < 50; ++e)
        run_episode(w.ctx(e, 0.9), tick, pred, q, spec, rng);
    auto ctx = w.ctx(50, 0.0);
    ctx.learn = false;
    const auto frozen = q;
    const auto log = run_episode(ctx, tick, pred, q, spec, rng);
    CHECK(q == frozen);
    for (std::size_t k = 5; k < log.steps.size(); ++k)
    {
        CHECK(log.steps[k].action == log.steps[k - 5].action);
    }
}

TEST_CASE("a lone UE learns the best beam of its group")
{
    std::size_t ok = 0;
    const std::size_t seeds = 20;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed)
    {
        auto w = lone_ue_world(seed);
        const auto tick = prepare_tick(w.scene, w.params, w.cb);
        auto q = make_two_step_table(1, 1, w.cb, 0.001, 0.9);
        OracleGroupPredictor pred(w.cb);
        RewardSpec spec;
        Rng rng(seed * 31);
        const EpsilonSchedule schedule{0.9, 0.0, 150};
        for (std::size_t e = 0; e < 200; ++e)
            run_episode(w.ctx(e, epsilon_at(schedule, e)), tick, pred, q, spec, rng);

        const BeamIndex oracle = tick.oracle.assignment[0];
        const GroupIndex g = w.cb.group_of(oracle);
        // Within-group oracle computed independently of the agent.
        BeamIndex best = w.cb.group_base(g);
        for (auto b : w.cb.beams_in_group(g))
        {
            if (throughput(w.scene, w.params, {b}, w.cb).total_bps >
                throughput(w.scene, w.params, {best}, w.cb).total_bps)
                best = b;
        }
        ok += w.cb.group_base(g) + q.greedy({0, 0, g}) == best ? 1 : 0;
    }
    CHECK(static_cast<double>(ok) / seeds >= 0.95);
}

TEST_CASE("RL-only baseline")
{
    auto w = five_ue_world(2);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    auto q = make_rl_only_table(5, 5, w.cb, 0.001, 0.9);
    CHECK(q.n_actions() == 64);
    CHECK(q.n_groups() == 1);
    RewardSpec spec;
    Rng rng(1);
    const auto log = run_rl_only(w.ctx(0, 0.9), tick, q, spec, rng);
    REQUIRE(log.steps.size() == 174);
    for (const auto& s : log.steps)
    {
        CHECK(s.beam == s.action);
        CHECK(s.state.group == 0);
    }
    auto wrong = make_two_step_table(5, 5, w.cb, 0.001, 0.9);
    CHECK_THROWS_AS(run_rl_only(w.ctx(0, 0.9), tick, wrong, spec, rng), ConfigError);
    OracleGroupPredictor pred(w.cb);
    CHECK_THROWS_AS(run_episode(w.ctx(0, 0.9), tick, pred, q, spec, rng), ConfigError);

    SUBCASE("lone UE converges to the global oracle beam")
    {
        std::size_t ok = 0;
        const std::size_t seeds = 20;
        for (std::uint64_t seed = 1; seed <= seeds; ++seed)
        {
            auto lw = lone_ue_world(seed);
            const auto lt = prepare_tick(lw.scene, lw.params, lw.cb);
            auto lq = make_rl_only_table(1, 1, lw.cb, 0.001, 0.9);
            RewardSpec ls;
            Rng lr(seed * 7);
            const EpsilonSchedule schedule{0.9, 0.0, 150};
            for (std::size_t e = 0; e < 200; ++e)
                run_rl_only(lw.ctx(e, epsilon_at(schedule, e)), lt, lq, ls, lr);
            ok += lq.greedy({0, 0, 0}) == lt.oracle.assignment[0] ? 1 : 0;
        }
        CHECK(static_cast<double>(ok) / seeds >= 0.9);
    }
}

TEST_CASE("MMT-only baseline")
{
    auto w = five_ue_world(5);
    const auto tick = prepare_tick(w.scene, w.params, w.cb);
    RewardSpec spec;
    OracleBeamPredictor oracle(w.cb);
    BeamPrediction prediction;
    const auto log = run_mmt_only(w.ctx(0, 0.0), tick, oracle, spec, &prediction);
    REQUIRE(log.steps.size() == 174);
    for (const auto& s : log.steps)
    {
        CHECK(s.beam == tick.oracle.assignment[s.ue]);
        CHECK(s.total_bps == tick.oracle.total_bps);
        CHECK(s.reward == 1.0);
    }

    NoisyBeamPredictor noisy(w.cb, 0.72, 3);
    std::size_t hits = 0, total = 0;
    for (std::size_t t = 0; t < 1000; ++t)
    {
        auto ctx = w.ctx(t, 0.0);
        run_mmt_only(ctx, tick, noisy, spec, &prediction);
        for (UeIndex u = 0; u < 5; ++u)
        {
            hits += prediction.top[u] == tick.oracle.assignment[u] ? 1 : 0;
            ++total;
        }
    }
    CHECK(static_cast<double>(hits) / total == doctest::Approx(0.72).epsilon(0.03 / 0.72));
}
