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
#include "beamsim/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace beamsim;

TEST_CASE("Q-table layout")
{
    QTable q(5, 5, 8, 8);
    CHECK(q.size() == 8 * 8 * 5 * 5);
    for (double v : q.values())
    {
        CHECK(v == 0.0);
    }
    CHECK(q.alpha() == 0.001);
    CHECK(q.gamma() == 0.9);
    CHECK(q.row_offset({0, 0, 0}) == 0);
    CHECK(q.row_offset({0, 0, 1}) == 8);
    CHECK(q.row_offset({0, 1, 0}) == 64);
    CHECK(q.row_offset({1, 0, 0}) == 320);
    CHECK_THROWS_AS(q.row_offset({5, 0, 0}), IndexError);
    CHECK_THROWS_AS(q.row_offset({0, 5, 0}), IndexError);
    CHECK_THROWS_AS(q.row_offset({0, 0, 8}), IndexError);
    CHECK_THROWS_AS(q.at({0, 0, 0}, 8), IndexError);
    CHECK_THROWS_AS(QTable(1, 1, 1, 1, 0.0, 0.9), ConfigError);
    CHECK_THROWS_AS(QTable(1, 1, 1, 1, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(QTable(1, 1, 1, 0), ConfigError);
}

TEST_CASE("epsilon-greedy selection")
{
    QTable q(1, 1, 1, 8);
    Rng rng(1);
    CHECK(select_action(q, {0, 0, 0}, 0.0, rng) == 0);
    q.set({0, 0, 0}, 2, 5.0);
    CHECK(select_action(q, {0, 0, 0}, 0.0, rng) == 2);
    q.set({0, 0, 0}, 6, 5.0);
    CHECK(q.greedy({0, 0, 0}) == 2);
    CHECK_THROWS_AS(select_action(q, {1, 0, 0}, 0.0, rng), IndexError);

    std::vector<std::size_t> counts(8, 0);
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i)
    {
        ++counts[select_action(q, {0, 0, 0}, 1.0, rng)];
    }
    for (auto c : counts)
    {
        CHECK(static_cast<double>(c) / n == doctest::Approx(0.125).epsilon(0.08));
    }
}

TEST_CASE("Q update")
{
    QTable q(2, 1, 1, 8);
    q_update(q, {0, 0, 0}, 3, 1.0, {1, 0, 0});
    CHECK(q.at({0, 0, 0}, 3) == 0.001);
    for (std::size_t a = 0; a < 8; ++a)
    {
        if (a != 3)
            CHECK(q.at({0, 0, 0}, a) == 0.0);
        CHECK(q.at({1, 0, 0}, a) == 0.0);
    }

    QTable z(2, 1, 1, 4, 0.5, 0.5);
    z.set({0, 0, 0}, 1, 0.25);
    z.set({1, 0, 0}, 2, 0.5);
    q_update(z, {0, 0, 0}, 1, 0.0, {1, 0, 0});
    CHECK(z.at({0, 0, 0}, 1) == 0.25);

    CHECK_THROWS_AS(q_update(q, {0, 0, 0}, 0, std::numeric_limits<double>::infinity(), {0, 0, 0}), NumericError);
    CHECK_THROWS_AS(q_update(q, {0, 0, 0}, 0, std::nan(""), {0, 0, 0}), NumericError);
    CHECK_THROWS_AS(q_update(q, {0, 0, 0}, 8, 1.0, {0, 0, 0}), IndexError);
}

TEST_CASE("Q update matches a shadow recomputation bit for bit")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        QTable q(3, 2, 4, 8, 0.1, 0.9);
        std::vector<double> shadow(3 * 2 * 4 * 8, 0.0);
        const auto idx = [](std::size_t u, std::size_t l, std::size_t g, std::size_t a) {
            return ((u * 2 + l) * 4 + g) * 8 + a;
        };
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> U(0, 2), L(0, 1), G(0, 3), A(0, 7);
        std::uniform_real_distribution<double> R(-1.0, 1.0);
        for (int step = 0; step < 50; ++step)
        {
            const AgentState s{U(rng), L(rng), G(rng)};
            const AgentState n{U(rng), L(rng), G(rng)};
            const std::size_t a = A(rng);
            const double r = R(rng);
            q_update(q, s, a, r, n);

            double best = shadow[idx(n.ue, n.loc, n.group, 0)];
            for (std::size_t b = 1; b < 8; ++b)
                best = std::max(best, shadow[idx(n.ue, n.loc, n.group, b)]);
            double& cell = shadow[idx(s.ue, s.loc, s.group, a)];
            cell = cell + 0.1 * (r + 0.9 * best - cell);
        }
        const auto v = q.values();
        for (std::size_t i = 0; i < shadow.size(); ++i)
        {
            CHECK(v[i] == shadow[i]);
        }
    }
}

TEST_CASE("Q values stay inside the reward-implied bounds")
{
    QTable q(2, 2, 2, 4, 0.5, 0.9);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> B(0, 1), A(0, 3);
    std::bernoulli_distribution hit(0.5);
    const double lo = -1.0 / (1.0 - 0.9);
    const double hi = 1.0 / (1.0 - 0.9);
    for (int i = 0; i < 100000; ++i)
    {
        q_update(q, {B(rng), B(rng), B(rng)}, A(rng), hit(rng) ? 1.0 : -1.0, {B(rng), B(rng), B(rng)});
    }
    for (double v : q.values())
    {
        CHECK(v >= lo);
        CHECK(v <= hi);
    }
}

TEST_CASE("threshold reward")
{
    RewardSpec spec;
    CHECK_THROWS_AS(reward_of(1.0, spec), StateError);
    spec.resolve(100.0);
    REQUIRE(spec.r_th.has_value());
    CHECK(*spec.r_th == doctest::Approx(80.0));
    CHECK(reward_of(100.0, spec) == 1.0);
    CHECK(reward_of(*spec.r_th, spec) == -1.0);
    CHECK(reward_of(std::nextafter(*spec.r_th, 1e9), spec) == 1.0);

    RewardSpec fixed;
    fixed.mode = ThresholdMode::kFixed;
    fixed.r_th = 5.0;
    fixed.resolve(1000.0);
    CHECK(*fixed.r_th == 5.0);
    CHECK(reward_of(5.0, fixed) == -1.0);

    RewardSpec inverted;
    inverted.reward_hit = -1.0;
    inverted.reward_miss = 1.0;
    CHECK_THROWS_AS(inverted.validate(), ConfigError);
    RewardSpec unset;
    unset.mode = ThresholdMode::kFixed;
    CHECK_THROWS_AS(unset.validate(), ConfigError);
}

TEST_CASE("epsilon schedule")
{
    const EpsilonSchedule s{0.9, 0.6, 100};
    CHECK(epsilon_at(s, 0) == 0.9);
    CHECK(epsilon_at(s, 50) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(epsilon_at(s, 100) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(epsilon_at(s, 1000) == 0.6);
    CHECK(epsilon_at(EpsilonSchedule{0.9, 0.6, 0}, 0) == 0.6);
    CHECK_THROWS_AS((EpsilonSchedule{0.5, 0.6, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((EpsilonSchedule{1.5, 0.6, 10}.validate()), ConfigError);
}

TEST_CASE("Q-table snapshots")
{
    const auto dir = testing::scratch_dir("qtable");
    QTable q(2, 3, 2, 4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t l = 0; l < 3; ++l)
            for (std::size_t g = 0; g < 2; ++g)
                for (std::size_t a = 0; a < 4; ++a)
                    q.set({u, l, g}, a, d(rng));

    write_qtable_csv(q, dir / "q.csv");
    CHECK(testing::first_line(dir / "q.csv") == "ue,loc,group,action,value");
    QTable from_csv(2, 3, 2, 4);
    read_qtable_csv(from_csv, dir / "q.csv");
    CHECK(from_csv == q);

    write_qtable_binary(q, dir / "q.bin");
    QTable from_bin(2, 3, 2, 4);
    read_qtable_binary(from_bin, dir / "q.bin");
    CHECK(from_bin == q);

    QTable wrong(2, 3, 2, 8);
    CHECK_THROWS_AS(read_qtable_binary(wrong, dir / "q.bin"), DataError);
    CHECK_THROWS_AS(read_qtable_csv(wrong, dir / "q.csv"), DataError);
    CHECK_THROWS_AS(read_qtable_binary(wrong, dir / "none.bin"), IoError);
}
