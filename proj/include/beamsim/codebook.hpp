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

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace beamsim
{

using BeamIndex = std::size_t;
using GroupIndex = std::size_t;

struct AngleSpan
{
    double min = 0.0;
    double max = 0.0;
};

/// The fixed set of steering angles available at the base station, split into
/// angle-contiguous groups. Immutable once built.
///
/// `angle_of` is the lookup from a beam-assignment index to its steering
/// angle; `group_of` is total and surjective onto [0, n_groups()).
class BeamCodebook
{
public:
    /// Uniform placement with a half-step offset: beam i sits at
    /// min + (i + 0.5) * (max - min) / n_beams. Beams [0, n/g) form group 0.
    static BeamCodebook uniform(std::size_t n_beams, std::size_t n_groups, AngleSpan span);

    /// Explicit angles, e.g. from a `beam_index,angle_rad,group_index` CSV.
    /// Validates every invariant of the uniform constructor.
    static BeamCodebook from_table(std::vector<double> angles, std::vector<GroupIndex> groups);

    std::size_t n_beams() const noexcept { return angles_.size(); }
    std::size_t n_groups() const noexcept { return n_groups_; }
    std::size_t beams_per_group() const noexcept { return angles_.size() / n_groups_; }

    double angle_of(BeamIndex beam) const;
    GroupIndex group_of(BeamIndex beam) const;

    /// First beam of `group`; beams in a group are contiguous.
    BeamIndex group_base(GroupIndex group) const;
    std::vector<BeamIndex> beams_in_group(GroupIndex group) const;

    std::span<const double> angles() const noexcept { return angles_; }

private:
    BeamCodebook(std::vector<double> angles, std::vector<GroupIndex> groups, std::size_t n_groups);

    std::vector<double> angles_;
    std::vector<GroupIndex> group_of_;
    std::size_t n_groups_ = 0;
};

BeamCodebook build_codebook(std::size_t n_beams, std::size_t n_groups, AngleSpan span);

BeamCodebook load_codebook_csv(const std::filesystem::path& path);
void write_codebook_csv(const BeamCodebook& cb, const std::filesystem::path& path);

} // namespace beamsim
