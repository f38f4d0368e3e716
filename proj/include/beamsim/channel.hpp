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

#include "beamsim/codebook.hpp"
#include "beamsim/scene.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace beamsim
{

enum class PathLossMode
{
    /// 128.1 + 37.6 log10(d_km) replaces every distance-dependent term.
    kLos,
    /// Raw free-space (lambda / 4 pi R)^2 with no additional loss.
    kFreeSpace,
};

struct ChannelParams
{
    double p_t_dbm = 40.0;
    /// Total noise power over the UE bandwidth.
    double noise_dbm = -10.0;
    double wavelength_m = 0.005;
    std::size_t n_antennas = 64;
    /// Element spacing in wavelengths.
    double d_a = 0.5;
    double g_r = 1.0;
    double g_max = 64.0;
    double bandwidth_hz = 20e6;
    PathLossMode path_loss = PathLossMode::kLos;

    void validate() const;
};

/// Per-UE serving beam. kNoBeam marks a UE without a beam.
using Assignment = std::vector<BeamIndex>;
inline constexpr BeamIndex kNoBeam = std::numeric_limits<BeamIndex>::max();

/// Converts a binary indicator matrix x[u][n] into an Assignment. Every row
/// must carry exactly one 1; anything else is an AssignmentError.
Assignment assignment_from_indicator(const std::vector<std::vector<std::uint8_t>>& x);

/// Throws AssignmentError unless every UE of an n_ue scene has exactly one
/// valid beam.
void validate_assignment(const Assignment& a, std::size_t n_ue, const BeamCodebook& cb);

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;
double dbm_to_watts(double dbm) noexcept;
double watts_to_dbm(double watts) noexcept;

double path_loss_db(double distance_km);

/// Steered sinc-squared array pattern scaled to g_max; equals g_max exactly
/// when theta == theta_b.
double array_gain(double theta, double theta_b, const ChannelParams& params);

/// Received power in watts for a UE at `distance_km` and bearing `theta`
/// served on a beam steered to `theta_b`.
double received_power(const ChannelParams& params, double distance_km, double theta, double theta_b);

/// SINR at UE `u`. Interference from UE v is the power UE u receives, along
/// its own bearing, from the beam serving v.
double sinr(const Scene& scene, const ChannelParams& params, const Assignment& assignment,
            const BeamCodebook& cb, UeIndex u);

struct Throughput
{
    double total_bps = 0.0;
    double se_total = 0.0;
    std::vector<double> per_ue_bps;
    std::vector<double> per_ue_sinr;
};

Throughput throughput(const Scene& scene, const ChannelParams& params, const Assignment& assignment,
                      const BeamCodebook& cb);

} // namespace beamsim
