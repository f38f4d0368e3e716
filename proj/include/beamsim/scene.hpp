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
#include <limits>
#include <vector>

namespace beamsim
{

using UeIndex = std::size_t;

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

struct Ue
{
    std::size_t id = 0;
    std::size_t location_index = 0;
    Point position;
};

/// Physical state at one instant: one base station and the UEs it serves.
/// Each UE occupies one of its own `n_loc` candidate locations.
struct Scene
{
    Point bs_position;
    std::vector<Ue> ues;
    /// location_table[ue][loc] = candidate coordinates (meters)
    std::vector<std::vector<Point>> location_table;
    std::size_t n_loc = 0;

    std::size_t n_ue() const noexcept { return ues.size(); }

    double distance_m(UeIndex u) const;
    double distance_km(UeIndex u) const { return distance_m(u) / 1000.0; }

    /// Bearing of the UE seen from the base station, in (0, pi) for a valid scene.
    double angle_to_bs(UeIndex u) const;

    /// Moves UE `u` to candidate `loc` and updates its coordinates.
    void place(UeIndex u, std::size_t loc);

    /// Throws ConfigError when a scene invariant does not hold.
    void validate() const;
};

} // namespace beamsim
