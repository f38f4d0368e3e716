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

#include "beamsim/channel.hpp"
#include "beamsim/codebook.hpp"
#include "beamsim/environment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testing
{

inline constexpr double kPi = std::numbers::pi;

/// Scene with one fixed location per UE, given as (range m, bearing rad).
inline beamsim::Scene polar_scene(const std::vector<std::pair<double, double>>& ues)
{
    beamsim::Scene s;
    s.n_loc = 1;
    for (std::size_t u = 0; u < ues.size(); ++u)
    {
        const auto [r, th] = ues[u];
        const beamsim::Point p{r * std::cos(th), r * std::sin(th)};
        s.location_table.push_back({p});
        s.ues.push_back({u, 0, p});
    }
    s.validate();
    return s;
}

inline beamsim::BeamCodebook default_codebook()
{
    return beamsim::build_codebook(64, 8, {0.0, kPi});
}

/// Fresh, empty scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("beamsim_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string first_line(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

/// Link budget written out from scratch in dB, independent of the library.
namespace physics
{

inline double gain(double theta, double theta_b, double n_ant, double d_a, double g_max)
{
    const double x = n_ant * kPi * d_a * (std::cos(theta) - std::cos(theta_b));
    if (std::abs(x) < 1e-300)
    {
        return g_max;
    }
    return g_max * std::pow(std::sin(x) / x, 2.0);
}

inline double rx_watts(const beamsim::ChannelParams& p, double d_m, double theta, double theta_b)
{
    const double pl_db = 128.1 + 37.6 * std::log10(d_m / 1000.0);
    const double g_db = 10.0 * std::log10(gain(theta, theta_b, static_cast<double>(p.n_antennas), p.d_a, p.g_max) *
                                          p.g_r);
    return std::pow(10.0, (p.p_t_dbm + g_db - pl_db) / 10.0) / 1000.0;
}

struct Link
{
    double d_m;
    double theta;
};

inline std::vector<double> sinr(const beamsim::ChannelParams& p, const std::vector<Link>& ues,
                                const std::vector<double>& beam_angles)
{
    const double noise = std::pow(10.0, p.noise_dbm / 10.0) / 1000.0;
    std::vector<double> out;
    for (std::size_t u = 0; u < ues.size(); ++u)
    {
        double interference = 0.0;
        for (std::size_t v = 0; v < ues.size(); ++v)
        {
            if (v != u)
            {
                interference += rx_watts(p, ues[u].d_m, ues[u].theta, beam_angles[v]);
            }
        }
        out.push_back(rx_watts(p, ues[u].d_m, ues[u].theta, beam_angles[u]) / (noise + interference));
    }
    return out;
}

} // namespace physics

inline double rel_err(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace testing
