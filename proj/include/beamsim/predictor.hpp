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
#include "beamsim/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beamsim
{

/// Per-UE probability vectors over classes (groups or beams) for one tick.
/// `top[u]` is the argmax of `scores[u]`, lowest index on ties.
struct ClassScores
{
    std::size_t tick = 0;
    std::vector<std::vector<double>> scores;
    std::vector<std::size_t> top;

    /// Validates that each row is a probability vector (sum within 1e-9 of
    /// one, all entries non-negative) and derives `top`.
    static ClassScores from_scores(std::size_t tick, std::vector<std::vector<double>> scores, double tol = 1e-9);

    /// Classes of UE u ordered by descending score; ties go to lower index.
    std::vector<std::size_t> ranking(std::size_t u) const;
};

using GroupPrediction = ClassScores;
using BeamPrediction = ClassScores;

/// What a predictor may peek at besides the scene: the tick index and the
/// throughput-optimal assignment the environment computed for this tick.
struct OracleContext
{
    std::size_t tick = 0;
    std::span<const BeamIndex> oracle_beams;
};

/// Scores concentrated on `center` and decaying geometrically with class
/// distance, so an angle-ordered ranking follows from them.
std::vector<double> peaked_scores(std::size_t n_classes, std::size_t center);

/// Counter-based draws keyed by (seed, tick, ue). Predictors that share a
/// seed see the same draws regardless of call order, which is what couples
/// the group and beam predictors under matched seeds.
struct NoiseDraw
{
    double u = 0.0;
    std::uint64_t wrong_group = 0;
    std::uint64_t wrong_in_group = 0;
    std::uint64_t beam_in_wrong_group = 0;
};

NoiseDraw noise_draw(std::uint64_t seed, std::size_t tick, std::size_t ue);

class GroupPredictor
{
public:
    virtual ~GroupPredictor() = default;
    virtual GroupPrediction predict(const Scene& scene, const OracleContext& ctx) = 0;
    virtual std::string_view kind() const = 0;
};

class OracleGroupPredictor final : public GroupPredictor
{
public:
    explicit OracleGroupPredictor(const BeamCodebook& cb) : cb_(&cb) {}
    GroupPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "oracle"; }

private:
    const BeamCodebook* cb_;
};

/// Emits the oracle group with probability p, otherwise a uniformly drawn
/// wrong group.
class NoisyOraclePredictor final : public GroupPredictor
{
public:
    NoisyOraclePredictor(const BeamCodebook& cb, double p, std::uint64_t seed);
    GroupPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "noisy"; }
    double p() const noexcept { return p_; }

private:
    const BeamCodebook* cb_;
    double p_;
    std::uint64_t seed_;
};

/// Nearest-calibrated-location lookup: (ue, position) -> group.
class GpsTablePredictor final : public GroupPredictor
{
public:
    struct Entry
    {
        Point position;
        GroupIndex group = 0;
    };

    GpsTablePredictor(const BeamCodebook& cb, std::vector<std::vector<Entry>> table);

    /// Records, for every UE and every candidate location, the group of that
    /// UE's beam in the joint oracle with the other UEs where they are.
    static GpsTablePredictor calibrate(const Scene& scene, const ChannelParams& params, const BeamCodebook& cb);

    GroupPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "gps_table"; }
    const std::vector<std::vector<Entry>>& table() const noexcept { return table_; }

private:
    const BeamCodebook* cb_;
    std::vector<std::vector<Entry>> table_;
};

/// A recorded prediction stream `tick,ue_id,<p>0,...,<p>{n-1}`.
class PredictionStream
{
public:
    /// prefix "g" for group streams, "b" for beam streams.
    static PredictionStream read(const std::filesystem::path& path, std::size_t n_classes, char prefix = 'g');
    static void write(const std::filesystem::path& path, std::span<const ClassScores> ticks, std::size_t n_classes,
                      char prefix = 'g');

    std::size_t n_classes() const noexcept { return n_classes_; }
    std::size_t n_ticks() const noexcept { return ticks_.size(); }

    /// Scores for every UE of an n_ue scene at `tick`; DataError when the tick
    /// or any UE row is missing.
    ClassScores at(std::size_t tick, std::size_t n_ue) const;

private:
    std::size_t n_classes_ = 0;
    std::filesystem::path source_;
    std::map<std::size_t, std::map<std::size_t, std::vector<double>>> ticks_;
};

class FilePredictor final : public GroupPredictor
{
public:
    explicit FilePredictor(PredictionStream stream) : stream_(std::move(stream)) {}
    GroupPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "file"; }

private:
    PredictionStream stream_;
};

struct GpsCalibration
{
    Scene scene;
    ChannelParams params;
};

struct PredictorSpec
{
    std::string kind = "oracle";
    double p = 1.0;
    std::uint64_t seed = 0;
    std::filesystem::path path;
    std::optional<GpsCalibration> calibration;
};

/// kind in {oracle, noisy, gps_table, file}. ConfigError on unknown kinds or
/// invalid parameters; IoError/DataError from the file variant.
std::unique_ptr<GroupPredictor> make_predictor(const PredictorSpec& spec, const BeamCodebook& cb);

/// Direct 64-way beam prediction used by the prediction-only baseline.
class BeamPredictor
{
public:
    virtual ~BeamPredictor() = default;
    virtual BeamPrediction predict(const Scene& scene, const OracleContext& ctx) = 0;
    virtual std::string_view kind() const = 0;
};

class OracleBeamPredictor final : public BeamPredictor
{
public:
    explicit OracleBeamPredictor(const BeamCodebook& cb) : cb_(&cb) {}
    BeamPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "oracle"; }

private:
    const BeamCodebook* cb_;
};

/// Emits the oracle beam with probability p, otherwise a uniformly drawn
/// wrong beam. Shares its draws with a NoisyOraclePredictor of the same seed:
/// when that predictor's accuracy is matched_group_accuracy(p), the beam
/// prediction is correct only if the group prediction is, and wrong
/// predictions fall into the same wrong group.
class NoisyBeamPredictor final : public BeamPredictor
{
public:
    NoisyBeamPredictor(const BeamCodebook& cb, double p, std::uint64_t seed);
    BeamPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "noisy"; }

private:
    const BeamCodebook* cb_;
    double p_;
    double p_group_;
    std::uint64_t seed_;
};

class FileBeamPredictor final : public BeamPredictor
{
public:
    explicit FileBeamPredictor(PredictionStream stream) : stream_(std::move(stream)) {}
    BeamPrediction predict(const Scene& scene, const OracleContext& ctx) override;
    std::string_view kind() const override { return "file"; }

private:
    PredictionStream stream_;
};

/// Group accuracy implied by a beam predictor of top-1 accuracy p_beam whose
/// errors are uniform over the other beams.
double matched_group_accuracy(double p_beam, const BeamCodebook& cb);
/// Inverse of matched_group_accuracy, clamped to [0, 1].
double matched_beam_accuracy(double p_group, const BeamCodebook& cb);

std::unique_ptr<BeamPredictor> make_beam_predictor(const PredictorSpec& spec, const BeamCodebook& cb);

} // namespace beamsim
