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

#include "beamsim/errors.hpp"
#include "beamsim/metrics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace beamsim;

TEST_CASE("cumulative reward")
{
    const std::vector<double> ones(174, 1.0);
    CHECK(cumulative_reward(ones, 0.9) == doctest::Approx((1.0 - std::pow(0.9, 174)) / 0.1).epsilon(1e-13));
    const std::vector<double> zeros(174, 0.0);
    CHECK(cumulative_reward(zeros, 0.9) == 0.0);

    std::mt19937_64 rng(2);
    std::bernoulli_distribution hit(0.4);
    std::vector<double> mixed;
    for (int i = 0; i < 174; ++i)
        mixed.push_back(hit(rng) ? 1.0 : -1.0);
    double expect = 0.0;
    for (std::size_t k = 0; k < mixed.size(); ++k)
        expect += std::pow(0.9, static_cast<double>(k)) * mixed[k];
    CHECK(cumulative_reward(mixed, 0.9) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(cumulative_reward(mixed, 0.9)) <= 1.0 / (1.0 - 0.9));

    EpisodeLog log;
    for (double r : mixed)
    {
        StepRecord s;
        s.reward = r;
        log.steps.push_back(s);
    }
    CHECK(cumulative_reward(log, 0.9) == cumulative_reward(mixed, 0.9));
    CHECK_THROWS_AS(cumulative_reward(EpisodeLog{}, 0.9), DataError);
}

TEST_CASE("top-k accuracy")
{
    std::vector<std::vector<BeamIndex>> r{{3, 1, 2, 0}, {0, 1, 2, 3}, {2, 3, 0, 1}};
    std::vector<BeamIndex> truth{3, 1, 1};
    CHECK(top_k_accuracy(r, truth, 1) == doctest::Approx(1.0 / 3));
    CHECK(top_k_accuracy(r, truth, 2) == doctest::Approx(2.0 / 3));
    CHECK(top_k_accuracy(r, truth, 4) == 1.0);
    std::vector<BeamIndex> heads{3, 0, 2};
    for (std::size_t k = 1; k <= 4; ++k)
        CHECK(top_k_accuracy(r, heads, k) == 1.0);
    CHECK_THROWS_AS(top_k_accuracy(r, std::vector<BeamIndex>{3, 1}, 1), DataError);
    CHECK_THROWS_AS(top_k_accuracy(r, truth, 0), DataError);
    CHECK_THROWS_AS(top_k_accuracy(r, truth, 5), DataError);

    std::mt19937_64 rng(4);
    std::vector<std::vector<BeamIndex>> many;
    std::vector<BeamIndex> labels;
    for (int i = 0; i < 500; ++i)
    {
        std::vector<BeamIndex> perm(64);
        std::iota(perm.begin(), perm.end(), BeamIndex{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        many.push_back(perm);
        labels.push_back(perm[i % 10]);
    }
    double prev = 0.0;
    for (std::size_t k = 1; k <= 64; ++k)
    {
        const double acc = top_k_accuracy(many, labels, k);
        CHECK(acc >= prev);
        prev = acc;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("run aggregation")
{
    const std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}};
    const auto s = aggregate_runs(same);
    CHECK(s.std == std::vector<double>{0, 0, 0});
    const std::vector<std::vector<double>> two{{0, 2}, {2, 0}};
    CHECK(aggregate_runs(two).mean == std::vector<double>{1, 1});
    const std::vector<std::vector<double>> ragged{{0, 2}, {2}};
    CHECK_THROWS_AS(aggregate_runs(ragged), DataError);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 3.0);
    std::vector<std::vector<double>> runs(10, std::vector<double>(20));
    for (auto& r : runs)
        for (auto& v : r)
            v = n(rng);
    const auto agg = aggregate_runs(runs);
    for (std::size_t i = 0; i < 20; ++i)
    {
        double m = 0.0;
        for (const auto& r : runs)
            m += r[i];
        m /= 10.0;
        double ss = 0.0;
        for (const auto& r : runs)
            ss += (r[i] - m) * (r[i] - m);
        CHECK(agg.mean[i] == doctest::Approx(m).epsilon(1e-12));
        CHECK(agg.std[i] == doctest::Approx(std::sqrt(ss / 9.0)).epsilon(1e-12));
    }
    auto shuffled = runs;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto agg2 = aggregate_runs(shuffled);
    for (std::size_t i = 0; i < 20; ++i)
    {
        CHECK(agg2.mean[i] == doctest::Approx(agg.mean[i]).epsilon(1e-14));
        CHECK(agg2.std[i] == doctest::Approx(agg.std[i]).epsilon(1e-12));
    }
}

TEST_CASE("least-squares slope")
{
    std::vector<double> y;
    for (int i = 0; i < 100; ++i)
        y.push_back(3.0 - 0.25 * i);
    CHECK(fitted_slope(y, 0, 100) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(fitted_slope(y, 40, 60) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK_THROWS_AS(fitted_slope(y, 0, 101), DataError);
    CHECK_THROWS_AS(fitted_slope(y, 5, 6), DataError);
}

TEST_CASE("rankings")
{
    const auto cb = testing::default_codebook();
    QTable q(1, 1, 8, 8);
    const AgentState s{0, 0, 2};
    q.set(s, 5, 0.3);
    q.set(s, 1, 0.2);
    q.set(s, 6, -0.1);
    CHECK(q_ranking(q, s) == std::vector<std::size_t>{5, 1, 0, 2, 3, 4, 7, 6});

    const auto pred = GroupPrediction::from_scores(0, {peaked_scores(8, 2)});
    const auto r = two_step_ranking(q, s, pred, 0, cb);
    REQUIRE(r.size() == 64);
    CHECK(std::set<BeamIndex>(r.begin(), r.end()).size() == 64);
    CHECK(std::vector<BeamIndex>(r.begin(), r.begin() + 8) == std::vector<BeamIndex>{21, 17, 16, 18, 19, 20, 23, 22});
    // next the neighbouring groups, lower index first on equal score, beams in angle order
    CHECK(std::vector<BeamIndex>(r.begin() + 8, r.begin() + 16) ==
          std::vector<BeamIndex>{8, 9, 10, 11, 12, 13, 14, 15});
    CHECK(std::vector<BeamIndex>(r.begin() + 16, r.begin() + 24) ==
          std::vector<BeamIndex>{24, 25, 26, 27, 28, 29, 30, 31});
    CHECK(r.back() == 63);
}
