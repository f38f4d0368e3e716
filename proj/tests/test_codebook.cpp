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

#include "beamsim/codebook.hpp"
#include "beamsim/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace beamsim;
using testing::kPi;

TEST_CASE("uniform codebook placement and grouping")
{
    const auto cb = build_codebook(64, 8, {0.0, kPi});
    CHECK(cb.n_beams() == 64);
    CHECK(cb.n_groups() == 8);
    CHECK(cb.beams_per_group() == 8);
    CHECK(cb.angle_of(0) == doctest::Approx(kPi / 128).epsilon(1e-15));
    CHECK(cb.angle_of(31) == doctest::Approx(31.5 * kPi / 64).epsilon(1e-15));
    CHECK(cb.group_of(0) == 0);
    CHECK(cb.group_of(8) == 1);
    CHECK(cb.group_of(63) == 7);
    CHECK(cb.group_base(3) == 24);
    CHECK(cb.beams_in_group(0) == std::vector<BeamIndex>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(cb.beams_in_group(7) == std::vector<BeamIndex>{56, 57, 58, 59, 60, 61, 62, 63});

    const auto narrow = build_codebook(16, 4, {0.5, 2.5});
    CHECK(narrow.angle_of(3) == doctest::Approx(0.5 + 3.5 * 2.0 / 16).epsilon(1e-15));
}

TEST_CASE("codebook invariants")
{
    const auto cb = testing::default_codebook();
    std::set<BeamIndex> seen;
    for (GroupIndex g = 0; g < cb.n_groups(); ++g)
    {
        for (auto b : cb.beams_in_group(g))
        {
            CHECK(seen.insert(b).second);
            CHECK(cb.group_of(b) == g);
        }
    }
    CHECK(seen.size() == 64);
    for (BeamIndex b = 1; b < 64; ++b)
    {
        CHECK(cb.angle_of(b) > cb.angle_of(b - 1));
    }
    CHECK(cb.angle_of(0) > 0.0);
    CHECK(cb.angle_of(63) < kPi);
}

TEST_CASE("codebook errors")
{
    CHECK_THROWS_AS(build_codebook(6, 8, {0.0, kPi}), ConfigError);
    CHECK_THROWS_AS(build_codebook(64, 0, {0.0, kPi}), ConfigError);
    CHECK_THROWS_AS(build_codebook(64, 8, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(build_codebook(64, 8, {2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(build_codebook(64, 8, {0.0, 4.0}), ConfigError);
    const auto cb = testing::default_codebook();
    CHECK_THROWS_AS(cb.angle_of(64), IndexError);
    CHECK_THROWS_AS(cb.group_of(64), IndexError);
    CHECK_THROWS_AS(cb.beams_in_group(8), IndexError);
    CHECK_THROWS_AS(cb.group_base(8), IndexError);

    CHECK_THROWS_AS(BeamCodebook::from_table({0.2, 0.1}, {0, 1}), ConfigError);
    CHECK_THROWS_AS(BeamCodebook::from_table({0.1, 0.2, 0.3, 0.4}, {0, 1, 0, 1}), ConfigError);
    CHECK_THROWS_AS(BeamCodebook::from_table({0.0, 0.2}, {0, 1}), ConfigError);
    CHECK_THROWS_AS(BeamCodebook::from_table({0.1, 0.2, 0.3}, {0, 0, 1}), ConfigError);
}

TEST_CASE("codebook CSV round trip")
{
    const auto dir = testing::scratch_dir("codebook");
    const auto cb = testing::default_codebook();
    write_codebook_csv(cb, dir / "cb.csv");
    CHECK(testing::first_line(dir / "cb.csv") == "beam_index,angle_rad,group_index");
    const auto back = load_codebook_csv(dir / "cb.csv");
    REQUIRE(back.n_beams() == 64);
    for (BeamIndex b = 0; b < 64; ++b)
    {
        CHECK(back.angle_of(b) == cb.angle_of(b));
        CHECK(back.group_of(b) == cb.group_of(b));
    }

    testing::spit(dir / "bad.csv", "beam_index,angle_rad,group_index\n0,0.1,0\n2,0.2,1\n");
    CHECK_THROWS_AS(load_codebook_csv(dir / "bad.csv"), DataError);
    testing::spit(dir / "hdr.csv", "beam,angle,group\n0,0.1,0\n");
    CHECK_THROWS_AS(load_codebook_csv(dir / "hdr.csv"), DataError);
    CHECK_THROWS_AS(load_codebook_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("codebook CSV with an invalid table is a data error")
{
    const auto dir = testing::scratch_dir("codebook_invalid");
    testing::spit(dir / "dec.csv", "beam_index,angle_rad,group_index\n0,0.3,0\n1,0.2,1\n");
    CHECK_THROWS_AS(load_codebook_csv(dir / "dec.csv"), DataError);
}
