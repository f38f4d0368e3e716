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

#include "beamsim/channel.hpp"

#include "beamsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace beamsim
{

void ChannelParams::validate() const
{
    if (!(wavelength_m > 0.0) || !(bandwidth_hz > 0.0) || n_antennas < 1 || !(d_a > 0.0 && d_a <= 1.0))
    {
        throw ConfigError("channel: need wavelength > 0, bandwidth > 0, n_antennas >= 1, 0 < d_a <= 1");
    }
    if (!(g_max >= 1.0) || !(g_r >= 0.0))
    {
        throw ConfigError("channel: need g_max >= 1 and g_r >= 0");
    }
    if (!std::isfinite(p_t_dbm) || !std::isfinite(noise_dbm))
    {
        throw ConfigError("channel: transmit and noise power must be finite");
    }
}

Assignment assignment_from_indicator(const std::vector<std::vector<std::uint8_t>>& x)
{
    Assignment a(x.size(), kNoBeam);
    for (std::size_t u = 0; u < x.size(); ++u)
    {
        std::size_t ones = 0;
        for (std::size_t n = 0; n < x[u].size(); ++n)
        {
            if (x[u][n] > 1)
            {
                throw AssignmentError(fmt::format("indicator x[{}][{}] is not binary", u, n));
            }
            if (x[u][n] == 1)
            {
                ++ones;
                a[u] = n;
            }
        }
        if (ones != 1)
        {
            throw AssignmentError(fmt::format("UE {} has {} beams, exactly one required", u, ones));
        }
    }
    return a;
}

void validate_assignment(const Assignment& a, std::size_t n_ue, const BeamCodebook& cb)
{
    if (a.size() != n_ue)
    {
        throw AssignmentError(fmt::format("assignment covers {} UEs, scene has {}", a.size(), n_ue));
    }
    for (std::size_t u = 0; u < a.size(); ++u)
    {
        if (a[u] == kNoBeam)
        {
            throw AssignmentError(fmt::format("UE {} has no beam", u));
        }
        if (a[u] >= cb.n_beams())
        {
            throw AssignmentError(fmt::format("UE {} assigned beam {} outside the codebook", u, a[u]));
        }
    }
}

double db_to_linear(double db) noexcept
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) noexcept
{
    return 10.0 * std::log10(linear);
}

double dbm_to_watts(double dbm) noexcept
{
    return db_to_linear(dbm) * 1e-3;
}

double watts_to_dbm(double watts) noexcept
{
    return linear_to_db(watts * 1e3);
}

double path_loss_db(double distance_km)
{
    if (!(distance_km > 0.0))
    {
        throw DomainError(fmt::format("path loss: distance {} km must be positive", distance_km));
    }
    return 128.1 + 37.6 * std::log10(distance_km);
}

namespace
{

void check_angle(double theta, const char* what)
{
    if (!(theta > 0.0 && theta < std::numbers::pi))
    {
        throw DomainError(fmt::format("{} = {} rad outside (0, pi)", what, theta));
    }
}

} // namespace

double array_gain(double theta, double theta_b, const ChannelParams& params)
{
    check_angle(theta, "theta");
    check_angle(theta_b, "theta_b");
    // k_a * d_a * lambda with d_a in wavelengths collapses to 2 pi d_a.
    const double psi = 0.5 * static_cast<double>(params.n_antennas) * 2.0 * std::numbers::pi * params.d_a *
                       (std::cos(theta) - std::cos(theta_b));
    if (psi == 0.0)
    {
        return params.g_max;
    }
    const double s = std::sin(psi) / psi;
    return params.g_max * s * s;
}

double received_power(const ChannelParams& params, double distance_km, double theta, double theta_b)
{
    if (!(distance_km > 0.0))
    {
        throw DomainError(fmt::format("received power: distance {} km must be positive", distance_km));
    }
    const double gain = array_gain(theta, theta_b, params) * params.g_r;
    const double p_t = dbm_to_watts(params.p_t_dbm);
    switch (params.path_loss)
    {
    case PathLossMode::kFreeSpace:
    {
        const double r = distance_km * 1000.0;
        const double fs = params.wavelength_m / (4.0 * std::numbers::pi * r);
        return p_t * gain * fs * fs;
    }
    case PathLossMode::kLos:
    default:
        return p_t * gain * db_to_linear(-path_loss_db(distance_km));
    }
}

double sinr(const Scene& scene, const ChannelParams& params, const Assignment& assignment,
            const BeamCodebook& cb, UeIndex u)
{
    validate_assignment(assignment, scene.n_ue(), cb);
    if (u >= scene.n_ue())
    {
        throw IndexError(fmt::format("UE index {} out of range [0, {})", u, scene.n_ue()));
    }
    const double d = scene.distance_km(u);
    const double theta = scene.angle_to_bs(u);
    const double signal = received_power(params, d, theta, cb.angle_of(assignment[u]));
    double interference = 0.0;
    for (UeIndex v = 0; v < scene.n_ue(); ++v)
    {
        if (v != u)
        {
            interference += received_power(params, d, theta, cb.angle_of(assignment[v]));
        }
    }
    return signal / (dbm_to_watts(params.noise_dbm) + interference);
}

Throughput throughput(const Scene& scene, const ChannelParams& params, const Assignment& assignment,
                      const BeamCodebook& cb)
{
    validate_assignment(assignment, scene.n_ue(), cb);
    Throughput out;
    out.per_ue_bps.resize(scene.n_ue());
    out.per_ue_sinr.resize(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        const double s = sinr(scene, params, assignment, cb, u);
        const double se = std::log2(1.0 + s);
        out.per_ue_sinr[u] = s;
        out.per_ue_bps[u] = params.bandwidth_hz * se;
        out.se_total += se;
        out.total_bps += out.per_ue_bps[u];
    }
    return out;
}

} // namespace beamsim
