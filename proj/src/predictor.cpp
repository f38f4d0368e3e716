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

#include "beamsim/predictor.hpp"

#include "beamsim/csv.hpp"
#include "beamsim/environment.hpp"
#include "beamsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numeric>

namespace beamsim
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

GroupIndex oracle_group(const BeamCodebook& cb, const OracleContext& ctx, UeIndex u)
{
    if (u >= ctx.oracle_beams.size())
    {
        throw StateError(fmt::format("oracle context lacks a beam for UE {}", u));
    }
    return cb.group_of(ctx.oracle_beams[u]);
}

void check_probability(double p, std::string_view what)
{
    if (!(p >= 0.0 && p <= 1.0))
    {
        throw ConfigError(fmt::format("{}: accuracy p = {} outside [0, 1]", what, p));
    }
}

} // namespace

ClassScores ClassScores::from_scores(std::size_t tick, std::vector<std::vector<double>> scores, double tol)
{
    ClassScores out;
    out.tick = tick;
    out.top.resize(scores.size());
    for (std::size_t u = 0; u < scores.size(); ++u)
    {
        const auto& row = scores[u];
        if (row.empty())
        {
            throw DataError(fmt::format("tick {}: UE {} has no scores", tick, u));
        }
        double sum = 0.0;
        for (double s : row)
        {
            if (!(s >= 0.0) || !std::isfinite(s))
            {
                throw DataError(fmt::format("tick {}: UE {} has an invalid score {}", tick, u, s));
            }
            sum += s;
        }
        if (std::abs(sum - 1.0) > tol)
        {
            throw DataError(fmt::format("tick {}: UE {} scores sum to {}", tick, u, sum));
        }
        out.top[u] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    out.scores = std::move(scores);
    return out;
}

std::vector<std::size_t> ClassScores::ranking(std::size_t u) const
{
    const auto& row = scores.at(u);
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    return order;
}

std::vector<double> peaked_scores(std::size_t n_classes, std::size_t center)
{
    std::vector<double> s(n_classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c)
    {
        const auto dist = c > center ? c - center : center - c;
        s[c] = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(dist, 1000)));
        sum += s[c];
    }
    for (auto& v : s)
    {
        v /= sum;
    }
    return s;
}

NoiseDraw noise_draw(std::uint64_t seed, std::size_t tick, std::size_t ue)
{
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ static_cast<std::uint64_t>(tick));
    key = splitmix64(key ^ (static_cast<std::uint64_t>(ue) << 32));
    NoiseDraw d;
    d.u = static_cast<double>(splitmix64(key ^ 1) >> 11) * 0x1.0p-53;
    d.wrong_group = splitmix64(key ^ 2);
    d.wrong_in_group = splitmix64(key ^ 3);
    d.beam_in_wrong_group = splitmix64(key ^ 4);
    return d;
}

GroupPrediction OracleGroupPredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    std::vector<std::vector<double>> scores(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        scores[u] = peaked_scores(cb_->n_groups(), oracle_group(*cb_, ctx, u));
    }
    return ClassScores::from_scores(ctx.tick, std::move(scores));
}

NoisyOraclePredictor::NoisyOraclePredictor(const BeamCodebook& cb, double p, std::uint64_t seed)
    : cb_(&cb), p_(p), seed_(seed)
{
    check_probability(p, "noisy predictor");
}

GroupPrediction NoisyOraclePredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    const std::size_t n_groups = cb_->n_groups();
    std::vector<std::vector<double>> scores(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        const GroupIndex truth = oracle_group(*cb_, ctx, u);
        GroupIndex g = truth;
        const auto d = noise_draw(seed_, ctx.tick, u);
        if (!(d.u < p_) && n_groups > 1)
        {
            const GroupIndex k = d.wrong_group % (n_groups - 1);
            g = k < truth ? k : k + 1;
        }
        scores[u] = peaked_scores(n_groups, g);
    }
    return ClassScores::from_scores(ctx.tick, std::move(scores));
}

GpsTablePredictor::GpsTablePredictor(const BeamCodebook& cb, std::vector<std::vector<Entry>> table)
    : cb_(&cb), table_(std::move(table))
{
    if (table_.empty() || std::any_of(table_.begin(), table_.end(), [](const auto& t) { return t.empty(); }))
    {
        throw ConfigError("gps_table predictor: calibration table is empty");
    }
    for (const auto& ue_table : table_)
    {
        for (const auto& e : ue_table)
        {
            if (e.group >= cb.n_groups())
            {
                throw ConfigError(fmt::format("gps_table predictor: group {} out of range", e.group));
            }
        }
    }
}

GpsTablePredictor GpsTablePredictor::calibrate(const Scene& scene, const ChannelParams& params,
                                               const BeamCodebook& cb)
{
    std::vector<std::vector<Entry>> table(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        for (std::size_t l = 0; l < scene.location_table[u].size(); ++l)
        {
            Scene probe = scene;
            probe.place(u, l);
            const auto oracle = joint_oracle(probe, params, cb);
            table[u].push_back({probe.ues[u].position, cb.group_of(oracle.assignment[u])});
        }
    }
    return GpsTablePredictor(cb, std::move(table));
}

GroupPrediction GpsTablePredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    if (scene.n_ue() > table_.size())
    {
        throw DataError(fmt::format("gps_table predictor: calibrated for {} UEs, scene has {}", table_.size(),
                                    scene.n_ue()));
    }
    std::vector<std::vector<double>> scores(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        const auto& pos = scene.ues[u].position;
        const Entry* nearest = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : table_[u])
        {
            const double d = std::hypot(e.position.x - pos.x, e.position.y - pos.y);
            if (d < best)
            {
                best = d;
                nearest = &e;
            }
        }
        scores[u] = peaked_scores(cb_->n_groups(), nearest->group);
    }
    return ClassScores::from_scores(ctx.tick, std::move(scores));
}

PredictionStream PredictionStream::read(const std::filesystem::path& path, std::size_t n_classes, char prefix)
{
    const auto t = csv::read(path);
    std::vector<std::string> header{"tick", "ue_id"};
    for (std::size_t c = 0; c < n_classes; ++c)
    {
        header.push_back(fmt::format("{}{}", prefix, c));
    }
    csv::expect_header(t, header, path);

    PredictionStream s;
    s.n_classes_ = n_classes;
    s.source_ = path;
    std::optional<std::size_t> last_tick;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const auto line = t.line_numbers[r];
        const auto tick = csv::to_int(t.rows[r][0], path, line);
        const auto ue = csv::to_int(t.rows[r][1], path, line);
        if (tick < 0 || ue < 0)
        {
            throw DataError(fmt::format("{}:{}: negative tick or UE id", path.string(), line));
        }
        const auto tk = static_cast<std::size_t>(tick);
        if (last_tick && tk < *last_tick)
        {
            throw DataError(fmt::format("{}:{}: tick {} after tick {}; ticks must increase", path.string(), line,
                                        tk, *last_tick));
        }
        last_tick = tk;
        std::vector<double> scores(n_classes);
        double sum = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c)
        {
            scores[c] = csv::to_double(t.rows[r][2 + c], path, line);
            if (!(scores[c] >= 0.0) || !std::isfinite(scores[c]))
            {
                throw DataError(fmt::format("{}:{}: score {} is not a probability", path.string(), line, scores[c]));
            }
            sum += scores[c];
        }
        if (std::abs(sum - 1.0) > 1e-6)
        {
            throw DataError(fmt::format("{}:{}: scores sum to {}, not 1", path.string(), line, sum));
        }
        auto& rows = s.ticks_[tk];
        if (!rows.emplace(static_cast<std::size_t>(ue), std::move(scores)).second)
        {
            throw DataError(fmt::format("{}:{}: duplicate row for tick {} UE {}", path.string(), line, tk, ue));
        }
    }
    return s;
}

void PredictionStream::write(const std::filesystem::path& path, std::span<const ClassScores> ticks,
                             std::size_t n_classes, char prefix)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << "tick,ue_id";
    for (std::size_t c = 0; c < n_classes; ++c)
    {
        out << ',' << prefix << c;
    }
    out << '\n';
    for (const auto& t : ticks)
    {
        for (std::size_t u = 0; u < t.scores.size(); ++u)
        {
            if (t.scores[u].size() != n_classes)
            {
                throw DataError(fmt::format("tick {}: UE {} has {} scores, expected {}", t.tick, u,
                                            t.scores[u].size(), n_classes));
            }
            out << t.tick << ',' << u;
            for (double v : t.scores[u])
            {
                out << ',' << csv::format_double(v);
            }
            out << '\n';
        }
    }
}

ClassScores PredictionStream::at(std::size_t tick, std::size_t n_ue) const
{
    const auto it = ticks_.find(tick);
    if (it == ticks_.end())
    {
        throw DataError(fmt::format("{}: no predictions for tick {}", source_.string(), tick));
    }
    std::vector<std::vector<double>> scores(n_ue);
    for (std::size_t u = 0; u < n_ue; ++u)
    {
        const auto row = it->second.find(u);
        if (row == it->second.end())
        {
            throw DataError(fmt::format("{}: tick {} has no row for UE {}", source_.string(), tick, u));
        }
        scores[u] = row->second;
    }
    return ClassScores::from_scores(tick, std::move(scores), 1e-6);
}

GroupPrediction FilePredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    return stream_.at(ctx.tick, scene.n_ue());
}

std::unique_ptr<GroupPredictor> make_predictor(const PredictorSpec& spec, const BeamCodebook& cb)
{
    if (spec.kind == "oracle")
    {
        return std::make_unique<OracleGroupPredictor>(cb);
    }
    if (spec.kind == "noisy")
    {
        return std::make_unique<NoisyOraclePredictor>(cb, spec.p, spec.seed);
    }
    if (spec.kind == "gps_table")
    {
        if (!spec.calibration)
        {
            throw ConfigError("gps_table predictor needs a calibration scene");
        }
        return std::make_unique<GpsTablePredictor>(
            GpsTablePredictor::calibrate(spec.calibration->scene, spec.calibration->params, cb));
    }
    if (spec.kind == "file")
    {
        return std::make_unique<FilePredictor>(PredictionStream::read(spec.path, cb.n_groups(), 'g'));
    }
    throw ConfigError(fmt::format("unknown predictor kind '{}'", spec.kind));
}

BeamPrediction OracleBeamPredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    std::vector<std::vector<double>> scores(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        if (u >= ctx.oracle_beams.size())
        {
            throw StateError(fmt::format("oracle context lacks a beam for UE {}", u));
        }
        scores[u] = peaked_scores(cb_->n_beams(), ctx.oracle_beams[u]);
    }
    return ClassScores::from_scores(ctx.tick, std::move(scores));
}

double matched_group_accuracy(double p_beam, const BeamCodebook& cb)
{
    if (cb.n_beams() < 2)
    {
        return 1.0;
    }
    const double same_group = static_cast<double>(cb.beams_per_group() - 1) / static_cast<double>(cb.n_beams() - 1);
    return p_beam + (1.0 - p_beam) * same_group;
}

double matched_beam_accuracy(double p_group, const BeamCodebook& cb)
{
    if (cb.n_beams() < 2)
    {
        return 1.0;
    }
    const double same_group = static_cast<double>(cb.beams_per_group() - 1) / static_cast<double>(cb.n_beams() - 1);
    return std::clamp((p_group - same_group) / (1.0 - same_group), 0.0, 1.0);
}

NoisyBeamPredictor::NoisyBeamPredictor(const BeamCodebook& cb, double p, std::uint64_t seed)
    : cb_(&cb), p_(p), p_group_(0.0), seed_(seed)
{
    check_probability(p, "noisy beam predictor");
    p_group_ = matched_group_accuracy(p, cb);
}

BeamPrediction NoisyBeamPredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    const std::size_t n_groups = cb_->n_groups();
    const std::size_t per_group = cb_->beams_per_group();
    std::vector<std::vector<double>> scores(scene.n_ue());
    for (UeIndex u = 0; u < scene.n_ue(); ++u)
    {
        if (u >= ctx.oracle_beams.size())
        {
            throw StateError(fmt::format("oracle context lacks a beam for UE {}", u));
        }
        const BeamIndex truth = ctx.oracle_beams[u];
        const GroupIndex truth_group = cb_->group_of(truth);
        const auto d = noise_draw(seed_, ctx.tick, u);
        BeamIndex beam = truth;
        if (d.u < p_)
        {
            beam = truth;
        }
        else if (d.u < p_group_ && per_group > 1)
        {
            // wrong beam, right group
            const BeamIndex base = cb_->group_base(truth_group);
            const std::size_t k = d.wrong_in_group % (per_group - 1);
            const std::size_t offset = truth - base;
            beam = base + (k < offset ? k : k + 1);
        }
        else if (n_groups > 1)
        {
            const GroupIndex k = d.wrong_group % (n_groups - 1);
            const GroupIndex g = k < truth_group ? k : k + 1;
            beam = cb_->group_base(g) + d.beam_in_wrong_group % per_group;
        }
        scores[u] = peaked_scores(cb_->n_beams(), beam);
    }
    return ClassScores::from_scores(ctx.tick, std::move(scores));
}

BeamPrediction FileBeamPredictor::predict(const Scene& scene, const OracleContext& ctx)
{
    return stream_.at(ctx.tick, scene.n_ue());
}

std::unique_ptr<BeamPredictor> make_beam_predictor(const PredictorSpec& spec, const BeamCodebook& cb)
{
    if (spec.kind == "oracle")
    {
        return std::make_unique<OracleBeamPredictor>(cb);
    }
    if (spec.kind == "noisy")
    {
        return std::make_unique<NoisyBeamPredictor>(cb, spec.p, spec.seed);
    }
    if (spec.kind == "file")
    {
        return std::make_unique<FileBeamPredictor>(PredictionStream::read(spec.path, cb.n_beams(), 'b'));
    }
    throw ConfigError(fmt::format("unknown beam predictor kind '{}'", spec.kind));
}

} // namespace beamsim
