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

#include "beamsim/csv.hpp"
#include "beamsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>

namespace beamsim
{

BeamCodebook::BeamCodebook(std::vector<double> angles, std::vector<GroupIndex> groups, std::size_t n_groups)
    : angles_(std::move(angles)), group_of_(std::move(groups)), n_groups_(n_groups)
{
}

BeamCodebook BeamCodebook::uniform(std::size_t n_beams, std::size_t n_groups, AngleSpan span)
{
    if (n_beams == 0 || n_groups == 0 || n_beams % n_groups != 0)
    {
        throw ConfigError(fmt::format("codebook: {} beams cannot be split into {} equal groups", n_beams, n_groups));
    }
    if (!(span.min < span.max) || span.min < 0.0 || span.max > std::numbers::pi)
    {
        throw ConfigError(fmt::format("codebook: degenerate angle span [{}, {}]", span.min, span.max));
    }

    const std::size_t per_group = n_beams / n_groups;
    const double step = (span.max - span.min) / static_cast<double>(n_beams);
    std::vector<double> angles(n_beams);
    std::vector<GroupIndex> groups(n_beams);
    for (std::size_t i = 0; i < n_beams; ++i)
    {
        angles[i] = span.min + (static_cast<double>(i) + 0.5) * step;
        groups[i] = i / per_group;
    }
    return BeamCodebook(std::move(angles), std::move(groups), n_groups);
}

BeamCodebook BeamCodebook::from_table(std::vector<double> angles, std::vector<GroupIndex> groups)
{
    if (angles.empty() || angles.size() != groups.size())
    {
        throw ConfigError("codebook: angle and group tables must be non-empty and equally long");
    }
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        if (!(angles[i] > 0.0 && angles[i] < std::numbers::pi))
        {
            throw ConfigError(fmt::format("codebook: beam {} angle {} outside (0, pi)", i, angles[i]));
        }
        if (i > 0 && !(angles[i] > angles[i - 1]))
        {
            throw ConfigError(fmt::format("codebook: angles not strictly increasing at beam {}", i));
        }
    }

    // Groups must be contiguous runs 0,0,..,1,1,.. of equal length.
    std::size_t n_groups = groups.back() + 1;
    if (angles.size() % n_groups != 0)
    {
        throw ConfigError("codebook: groups are not of equal size");
    }
    const std::size_t per_group = angles.size() / n_groups;
    for (std::size_t i = 0; i < groups.size(); ++i)
    {
        if (groups[i] != i / per_group)
        {
            throw ConfigError(fmt::format("codebook: beam {} has group {}, expected contiguous group {}", i,
                                          groups[i], i / per_group));
        }
    }
    return BeamCodebook(std::move(angles), std::move(groups), n_groups);
}

double BeamCodebook::angle_of(BeamIndex beam) const
{
    if (beam >= angles_.size())
    {
        throw IndexError(fmt::format("beam index {} out of range [0, {})", beam, angles_.size()));
    }
    return angles_[beam];
}

GroupIndex BeamCodebook::group_of(BeamIndex beam) const
{
    if (beam >= group_of_.size())
    {
        throw IndexError(fmt::format("beam index {} out of range [0, {})", beam, group_of_.size()));
    }
    return group_of_[beam];
}

BeamIndex BeamCodebook::group_base(GroupIndex group) const
{
    if (group >= n_groups_)
    {
        throw IndexError(fmt::format("group index {} out of range [0, {})", group, n_groups_));
    }
    return group * beams_per_group();
}

std::vector<BeamIndex> BeamCodebook::beams_in_group(GroupIndex group) const
{
    const BeamIndex base = group_base(group);
    std::vector<BeamIndex> out(beams_per_group());
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i] = base + i;
    }
    return out;
}

BeamCodebook build_codebook(std::size_t n_beams, std::size_t n_groups, AngleSpan span)
{
    return BeamCodebook::uniform(n_beams, n_groups, span);
}

BeamCodebook load_codebook_csv(const std::filesystem::path& path)
{
    const auto t = csv::read(path);
    csv::expect_header(t, {"beam_index", "angle_rad", "group_index"}, path);
    std::vector<double> angles(t.rows.size());
    std::vector<GroupIndex> groups(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const auto line = t.line_numbers[r];
        const auto idx = csv::to_int(t.rows[r][0], path, line);
        if (idx != static_cast<long long>(r))
        {
            throw DataError(fmt::format("{}:{}: beam_index {} out of order", path.string(), line, idx));
        }
        angles[r] = csv::to_double(t.rows[r][1], path, line);
        const auto g = csv::to_int(t.rows[r][2], path, line);
        if (g < 0)
        {
            throw DataError(fmt::format("{}:{}: negative group index", path.string(), line));
        }
        groups[r] = static_cast<GroupIndex>(g);
    }
    try
    {
        return BeamCodebook::from_table(std::move(angles), std::move(groups));
    }
    catch (const ConfigError& e)
    {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_codebook_csv(const BeamCodebook& cb, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << "beam_index,angle_rad,group_index\n";
    for (BeamIndex b = 0; b < cb.n_beams(); ++b)
    {
        out << b << ',' << csv::format_double(cb.angle_of(b)) << ',' << cb.group_of(b) << '\n';
    }
}

} // namespace beamsim
