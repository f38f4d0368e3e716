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

#include "beamsim/experiment.hpp"

#include "beamsim/csv.hpp"
#include "beamsim/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <set>

namespace beamsim
{

using nlohmann::json;

std::string to_string(Method m)
{
    switch (m)
    {
    case Method::kMmtRl:
        return "mmt-rl";
    case Method::kRlOnly:
        return "rl-only";
    case Method::kMmtOnly:
        return "mmt-only";
    }
    return "?";
}

Method parse_method(const std::string& s)
{
    if (s == "mmt-rl")
        return Method::kMmtRl;
    if (s == "rl-only")
        return Method::kRlOnly;
    if (s == "mmt-only")
        return Method::kMmtOnly;
    throw ConfigError(fmt::format("unknown method '{}' (mmt-rl | rl-only | mmt-only)", s));
}

void ExperimentConfig::validate() const
{
    (void)codebook();
    channel.validate();
    if (scene_csv.empty())
    {
        scene.validate();
    }
    else if (!(scene.mobility >= 0.0 && scene.mobility <= 1.0))
    {
        throw ConfigError("scene: mobility outside [0, 1]");
    }
    (void)k_d();
    if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma >= 0.0 && gamma < 1.0))
    {
        throw ConfigError("agent: need 0 < alpha <= 1 and 0 <= gamma < 1");
    }
    epsilon_schedule().validate();
    reward.validate();
    if (predictor != "oracle" && predictor != "noisy" && predictor != "gps_table" && predictor != "file")
    {
        throw ConfigError(fmt::format("unknown predictor kind '{}'", predictor));
    }
    if (!(predictor_p >= 0.0 && predictor_p <= 1.0))
    {
        throw ConfigError(fmt::format("predictor: p = {} outside [0, 1]", predictor_p));
    }
    if (predictor == "file" && predictions_csv.empty())
    {
        throw ConfigError("predictor: kind 'file' needs predictions_csv");
    }
    if (beam_predictor != "oracle" && beam_predictor != "noisy" && beam_predictor != "file")
    {
        throw ConfigError(fmt::format("unknown beam predictor kind '{}'", beam_predictor));
    }
    if (beam_predictor_p && !(*beam_predictor_p >= 0.0 && *beam_predictor_p <= 1.0))
    {
        throw ConfigError(fmt::format("beam predictor: p = {} outside [0, 1]", *beam_predictor_p));
    }
    if (beam_predictor == "file" && beam_predictions_csv.empty())
    {
        throw ConfigError("beam predictor: kind 'file' needs predictions_csv");
    }
    if (episodes < 1 || rounds < 1)
    {
        throw ConfigError("experiment: need episodes >= 1 and rounds >= 1");
    }
}

BeamCodebook ExperimentConfig::codebook() const
{
    if (!codebook_csv.empty())
    {
        return load_codebook_csv(codebook_csv);
    }
    return build_codebook(n_beams, n_groups, angle_span);
}

EpsilonSchedule ExperimentConfig::epsilon_schedule() const
{
    return {eps_start, eps_end, decay_horizon.value_or(episodes / 2)};
}

std::size_t ExperimentConfig::k_d() const
{
    return Clock{mmt_period_ms, rl_step_ms}.k_d();
}

double ExperimentConfig::resolved_beam_p(const BeamCodebook& cb) const
{
    return beam_predictor_p.value_or(matched_beam_accuracy(predictor_p, cb));
}

namespace
{

template <typename T>
json opt(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::string path_loss_name(PathLossMode m)
{
    return m == PathLossMode::kFreeSpace ? "free_space" : "los";
}

/// Reads the members of one config section, rejecting anything unknown.
class Section
{
public:
    Section(const json& root, const char* name) : name_(name)
    {
        if (!root.is_object())
        {
            throw ConfigError("config: top level must be a JSON object");
        }
        const auto it = root.find(name);
        if (it != root.end())
        {
            if (!it->is_object())
            {
                throw ConfigError(fmt::format("config: section '{}' must be an object", name));
            }
            obj_ = &*it;
        }
    }

    ~Section() noexcept(false)
    {
        if (obj_ && std::uncaught_exceptions() == 0)
        {
            for (const auto& [k, v] : obj_->items())
            {
                if (!seen_.contains(k))
                {
                    throw ConfigError(fmt::format("config: unknown key '{}.{}'", name_, k));
                }
            }
        }
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        if (!obj_)
            return;
        const auto it = obj_->find(key);
        if (it == obj_->end())
            return;
        try
        {
            out = it->get<T>();
        }
        catch (const json::exception& e)
        {
            throw ConfigError(fmt::format("config: '{}.{}': {}", name_, key, e.what()));
        }
    }

    template <typename T>
    void get_opt(const char* key, std::optional<T>& out)
    {
        seen_.insert(key);
        if (!obj_)
            return;
        const auto it = obj_->find(key);
        if (it == obj_->end())
            return;
        if (it->is_null())
        {
            out.reset();
            return;
        }
        try
        {
            out = it->get<T>();
        }
        catch (const json::exception& e)
        {
            throw ConfigError(fmt::format("config: '{}.{}': {}", name_, key, e.what()));
        }
    }

    const json* object() const noexcept { return obj_; }

private:
    const char* name_;
    const json* obj_ = nullptr;
    std::set<std::string> seen_;
};

} // namespace

json to_json(const ExperimentConfig& c)
{
    json j;
    j["codebook"] = {{"n_beams", c.n_beams},
                     {"n_groups", c.n_groups},
                     {"angle_min", c.angle_span.min},
                     {"angle_max", c.angle_span.max},
                     {"angles_csv", c.codebook_csv}};
    j["channel"] = {{"p_t_dbm", c.channel.p_t_dbm},
                    {"noise_dbm", c.channel.noise_dbm},
                    {"wavelength_m", c.channel.wavelength_m},
                    {"n_antennas", c.channel.n_antennas},
                    {"d_a", c.channel.d_a},
                    {"g_r", c.channel.g_r},
                    {"g_max", c.channel.g_max},
                    {"bandwidth_hz", c.channel.bandwidth_hz},
                    {"path_loss", path_loss_name(c.channel.path_loss)}};
    j["scene"] = {{"n_ue", c.scene.n_ue},
                  {"n_loc", c.scene.n_loc},
                  {"bs_x", c.scene.bs_position.x},
                  {"bs_y", c.scene.bs_position.y},
                  {"r_min_m", c.scene.r_min_m},
                  {"r_max_m", c.scene.r_max_m},
                  {"bearing_min", c.scene.bearing_min},
                  {"bearing_max", c.scene.bearing_max},
                  {"mobility", c.scene.mobility},
                  {"scene_csv", c.scene_csv}};
    j["clock"] = {{"mmt_period_ms", c.mmt_period_ms}, {"rl_step_ms", c.rl_step_ms}};
    j["agent"] = {{"alpha", c.alpha},
                  {"gamma", c.gamma},
                  {"eps_start", c.eps_start},
                  {"eps_end", c.eps_end},
                  {"decay_horizon", opt(c.decay_horizon)}};
    j["reward"] = {{"mode", c.reward.mode == ThresholdMode::kAuto ? "auto" : "fixed"},
                   {"auto_factor", c.reward.auto_factor},
                   {"r_th", c.reward.mode == ThresholdMode::kFixed ? opt(c.reward.r_th) : json(nullptr)},
                   {"hit", c.reward.reward_hit},
                   {"miss", c.reward.reward_miss}};
    j["predictor"] = {{"kind", c.predictor}, {"p", c.predictor_p}, {"predictions_csv", c.predictions_csv}};
    j["beam_predictor"] = {
        {"kind", c.beam_predictor}, {"p", opt(c.beam_predictor_p)}, {"predictions_csv", c.beam_predictions_csv}};
    j["experiment"] = {{"method", to_string(c.method)},
                       {"episodes", c.episodes},
                       {"eval_ticks", c.eval_ticks},
                       {"rounds", c.rounds},
                       {"seed", c.seed},
                       {"workers", c.workers}};
    return j;
}

ExperimentConfig config_from_json(const json& j)
{
    static const std::set<std::string> sections{"codebook", "channel", "scene",          "clock",     "agent",
                                                "reward",   "predictor", "beam_predictor", "experiment"};
    if (!j.is_object())
    {
        throw ConfigError("config: top level must be a JSON object");
    }
    for (const auto& [k, v] : j.items())
    {
        if (!sections.contains(k))
        {
            throw ConfigError(fmt::format("config: unknown section '{}'", k));
        }
    }

    ExperimentConfig c;
    {
        Section s(j, "codebook");
        s.get("n_beams", c.n_beams);
        s.get("n_groups", c.n_groups);
        s.get("angle_min", c.angle_span.min);
        s.get("angle_max", c.angle_span.max);
        s.get("angles_csv", c.codebook_csv);
    }
    {
        Section s(j, "channel");
        s.get("p_t_dbm", c.channel.p_t_dbm);
        s.get("noise_dbm", c.channel.noise_dbm);
        s.get("wavelength_m", c.channel.wavelength_m);
        s.get("n_antennas", c.channel.n_antennas);
        s.get("d_a", c.channel.d_a);
        s.get("g_r", c.channel.g_r);
        std::optional<double> g_max;
        s.get_opt("g_max", g_max);
        // g_max follows the array size unless pinned.
        c.channel.g_max = g_max.value_or(static_cast<double>(c.channel.n_antennas));
        s.get("bandwidth_hz", c.channel.bandwidth_hz);
        std::string pl = "los";
        s.get("path_loss", pl);
        if (pl == "los")
            c.channel.path_loss = PathLossMode::kLos;
        else if (pl == "free_space")
            c.channel.path_loss = PathLossMode::kFreeSpace;
        else
            throw ConfigError(fmt::format("config: unknown path_loss '{}'", pl));
    }
    {
        Section s(j, "scene");
        s.get("n_ue", c.scene.n_ue);
        s.get("n_loc", c.scene.n_loc);
        s.get("bs_x", c.scene.bs_position.x);
        s.get("bs_y", c.scene.bs_position.y);
        s.get("r_min_m", c.scene.r_min_m);
        s.get("r_max_m", c.scene.r_max_m);
        s.get("bearing_min", c.scene.bearing_min);
        s.get("bearing_max", c.scene.bearing_max);
        s.get("mobility", c.scene.mobility);
        s.get("scene_csv", c.scene_csv);
    }
    {
        Section s(j, "clock");
        s.get("mmt_period_ms", c.mmt_period_ms);
        s.get("rl_step_ms", c.rl_step_ms);
    }
    {
        Section s(j, "agent");
        s.get("alpha", c.alpha);
        s.get("gamma", c.gamma);
        s.get("eps_start", c.eps_start);
        s.get("eps_end", c.eps_end);
        s.get_opt("decay_horizon", c.decay_horizon);
    }
    {
        Section s(j, "reward");
        std::string mode = "auto";
        s.get("mode", mode);
        if (mode == "auto")
            c.reward.mode = ThresholdMode::kAuto;
        else if (mode == "fixed")
            c.reward.mode = ThresholdMode::kFixed;
        else
            throw ConfigError(fmt::format("config: unknown reward mode '{}'", mode));
        s.get("auto_factor", c.reward.auto_factor);
        s.get_opt("r_th", c.reward.r_th);
        if (c.reward.mode == ThresholdMode::kAuto)
        {
            c.reward.r_th.reset();
        }
        s.get("hit", c.reward.reward_hit);
        s.get("miss", c.reward.reward_miss);
    }
    {
        Section s(j, "predictor");
        s.get("kind", c.predictor);
        s.get("p", c.predictor_p);
        s.get("predictions_csv", c.predictions_csv);
    }
    {
        Section s(j, "beam_predictor");
        s.get("kind", c.beam_predictor);
        s.get_opt("p", c.beam_predictor_p);
        s.get("predictions_csv", c.beam_predictions_csv);
    }
    {
        Section s(j, "experiment");
        std::string method = to_string(c.method);
        s.get("method", method);
        c.method = parse_method(method);
        s.get("episodes", c.episodes);
        s.get("eval_ticks", c.eval_ticks);
        s.get("rounds", c.rounds);
        s.get("seed", c.seed);
        s.get("workers", c.workers);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    }
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (j.is_object() && j.contains("config") && j.contains("manifest_version"))
    {
        return config_from_json(j.at("config"));
    }
    return config_from_json(j);
}

std::uint64_t round_seed(std::uint64_t seed, std::size_t round)
{
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(round) + 1;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace
{

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream)
{
    return round_seed(seed, static_cast<std::size_t>(stream));
}

constexpr std::uint64_t kSceneLayoutStream = 1;
constexpr std::uint64_t kMobilityStream = 2;
constexpr std::uint64_t kAgentStream = 3;
constexpr std::uint64_t kNoiseStream = 4;

Scene initial_scene(const ExperimentConfig& config, std::uint64_t seed)
{
    if (!config.scene_csv.empty())
    {
        return load_scene_csv(config.scene_csv, config.scene.bs_position);
    }
    return new_scene(config.scene, stream_seed(seed, kSceneLayoutStream));
}

double mean_se(const EpisodeLog& log)
{
    if (log.steps.empty())
    {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& s : log.steps)
    {
        sum += s.se_total;
    }
    return sum / static_cast<double>(log.steps.size());
}

} // namespace

RoundResult run_round(const ExperimentConfig& config, Method method, std::size_t round, bool keep_logs)
{
    const BeamCodebook cb = config.codebook();
    const ChannelParams& params = config.channel;
    const std::uint64_t seed = round_seed(config.seed, round);

    Scene scene = initial_scene(config, seed);
    Clock clock{config.mmt_period_ms, config.rl_step_ms};
    const std::size_t k_d = clock.k_d();
    const auto schedule = config.epsilon_schedule();
    Rng mobility_rng(stream_seed(seed, kMobilityStream));
    Rng agent_rng(stream_seed(seed, kAgentStream));
    const std::uint64_t noise_seed = stream_seed(seed, kNoiseStream);
    RewardSpec reward = config.reward;

    std::unique_ptr<GroupPredictor> group_predictor;
    std::unique_ptr<BeamPredictor> beam_predictor;
    std::optional<QTable> q;
    if (method == Method::kMmtRl)
    {
        PredictorSpec spec{config.predictor, config.predictor_p, noise_seed, config.predictions_csv, std::nullopt};
        if (spec.kind == "gps_table")
        {
            spec.calibration = GpsCalibration{scene, params};
        }
        group_predictor = make_predictor(spec, cb);
        q = make_two_step_table(scene.n_ue(), scene.n_loc, cb, config.alpha, config.gamma);
    }
    else if (method == Method::kRlOnly)
    {
        q = make_rl_only_table(scene.n_ue(), scene.n_loc, cb, config.alpha, config.gamma);
    }
    else
    {
        PredictorSpec spec{config.beam_predictor, config.resolved_beam_p(cb), noise_seed,
                           config.beam_predictions_csv, std::nullopt};
        beam_predictor = make_beam_predictor(spec, cb);
    }

    RoundResult out;
    out.round = round;
    out.seed = seed;
    out.cum_reward.reserve(config.episodes);
    out.train_se.reserve(config.episodes);

    for (std::size_t e = 0; e < config.episodes; ++e)
    {
        if (e > 0)
        {
            advance_mmt_tick(scene, clock, mobility_rng, config.scene.mobility);
        }
        const TickView tick = prepare_tick(scene, params, cb);
        EpisodeContext ctx;
        ctx.scene = &scene;
        ctx.params = &params;
        ctx.cb = &cb;
        ctx.k_d = k_d;
        ctx.episode = e;
        ctx.tick = e;
        ctx.seed = seed;
        ctx.epsilon = epsilon_at(schedule, e);
        ctx.record_sinr = keep_logs;

        EpisodeLog log;
        switch (method)
        {
        case Method::kMmtRl:
            log = run_episode(ctx, tick, *group_predictor, *q, reward, agent_rng);
            break;
        case Method::kRlOnly:
            log = run_rl_only(ctx, tick, *q, reward, agent_rng);
            break;
        case Method::kMmtOnly:
            log = run_mmt_only(ctx, tick, *beam_predictor, reward);
            break;
        }
        out.cum_reward.push_back(cumulative_reward(log, config.gamma));
        out.train_se.push_back(mean_se(log));
        if (method != Method::kMmtOnly)
        {
            out.step_seconds += log.step_seconds;
            out.steps += log.steps.size();
        }
        if (keep_logs)
        {
            out.logs.push_back(std::move(log));
        }
    }

    // Evaluation: no exploration, no learning.
    double se_sum = 0.0;
    for (std::size_t t = 0; t < config.eval_ticks; ++t)
    {
        const std::size_t tick_index = config.episodes + t;
        advance_mmt_tick(scene, clock, mobility_rng, config.scene.mobility);
        const TickView tick = prepare_tick(scene, params, cb);
        const OracleContext octx{tick_index, tick.oracle.assignment};
        Assignment assignment(scene.n_ue());
        switch (method)
        {
        case Method::kMmtRl:
        {
            const auto prediction = group_predictor->predict(scene, octx);
            for (UeIndex u = 0; u < scene.n_ue(); ++u)
            {
                const AgentState s{u, scene.ues[u].location_index, prediction.top[u]};
                assignment[u] = cb.group_base(prediction.top[u]) + q->greedy(s);
                out.rankings.push_back(two_step_ranking(*q, s, prediction, u, cb));
                out.group_hits += prediction.top[u] == cb.group_of(tick.oracle.assignment[u]) ? 1 : 0;
                ++out.group_samples;
            }
            break;
        }
        case Method::kRlOnly:
            for (UeIndex u = 0; u < scene.n_ue(); ++u)
            {
                const AgentState s{u, scene.ues[u].location_index, 0};
                assignment[u] = q->greedy(s);
                out.rankings.push_back(q_ranking(*q, s));
            }
            break;
        case Method::kMmtOnly:
        {
            const auto prediction = beam_predictor->predict(scene, octx);
            for (UeIndex u = 0; u < scene.n_ue(); ++u)
            {
                assignment[u] = prediction.top[u];
                out.rankings.push_back(prediction.ranking(u));
                out.group_hits += cb.group_of(prediction.top[u]) == cb.group_of(tick.oracle.assignment[u]) ? 1 : 0;
                ++out.group_samples;
            }
            break;
        }
        }
        for (UeIndex u = 0; u < scene.n_ue(); ++u)
        {
            out.oracle_labels.push_back(tick.oracle.assignment[u]);
        }
        se_sum += tick.channel.measure(assignment).se_total;
    }
    out.eval_se = config.eval_ticks > 0 ? se_sum / static_cast<double>(config.eval_ticks) : 0.0;
    out.q = std::move(q);
    return out;
}

std::size_t worker_count(const ExperimentConfig& config)
{
    std::size_t n = config.workers > 0 ? config.workers : static_cast<std::size_t>(omp_get_max_threads());
    if (const char* env = std::getenv("BEAMSIM_WORKERS"))
    {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0)
        {
            n = std::min(n, static_cast<std::size_t>(cap));
        }
    }
    return std::max<std::size_t>(n, 1);
}

std::vector<RoundResult> run_rounds(const ExperimentConfig& config, Method method, bool keep_logs)
{
    config.validate();
    std::vector<RoundResult> results(config.rounds);
    std::vector<std::exception_ptr> errors(config.rounds);
    const auto n = static_cast<std::ptrdiff_t>(config.rounds);
    const int threads = static_cast<int>(worker_count(config));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t r = 0; r < n; ++r)
    {
        try
        {
            results[static_cast<std::size_t>(r)] = run_round(config, method, static_cast<std::size_t>(r), keep_logs);
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    return results;
}

namespace
{

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
}

void write_episode_log(const std::vector<EpisodeLog>& logs, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "tick,step,ue,loc,group,action,beam,reward,sinr,throughput_bps,se_total\n";
    for (const auto& log : logs)
    {
        for (const auto& s : log.steps)
        {
            const double sinr = s.ue < s.sinr.size() ? s.sinr[s.ue] : 0.0;
            out << s.tick << ',' << s.step << ',' << s.ue << ',' << s.state.loc << ',' << s.state.group << ','
                << s.action << ',' << s.beam << ',' << csv::format_double(s.reward) << ','
                << csv::format_double(sinr) << ',' << csv::format_double(s.total_bps) << ','
                << csv::format_double(s.se_total) << '\n';
        }
    }
}

} // namespace

void write_manifest(const ExperimentConfig& config, const std::string& command, const std::filesystem::path& out_dir,
                    const json& extra)
{
    json m;
    m["manifest_version"] = 1;
    m["version"] = kVersion;
    m["command"] = command;
    auto resolved = config;
    resolved.decay_horizon = config.epsilon_schedule().decay_horizon;
    const auto cb = config.codebook();
    if (!resolved.beam_predictor_p && resolved.beam_predictor == "noisy")
    {
        resolved.beam_predictor_p = config.resolved_beam_p(cb);
    }
    m["config"] = to_json(resolved);
    m["k_d"] = config.k_d();
    json seeds = json::array();
    for (std::size_t r = 0; r < config.rounds; ++r)
    {
        seeds.push_back(round_seed(config.seed, r));
    }
    m["round_seeds"] = seeds;
    for (const auto& [k, v] : extra.items())
    {
        m[k] = v;
    }
    auto out = open_out(out_dir / "manifest.json");
    out << m.dump(2) << '\n';
}

RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir, bool write_logs)
{
    config.validate();
    ensure_dir(out_dir);
    RunSummary s;
    s.rounds = run_rounds(config, config.method, write_logs);

    std::vector<std::vector<double>> curves;
    for (const auto& r : s.rounds)
    {
        curves.push_back(r.cum_reward);
    }
    s.reward_curve = aggregate_runs(curves);

    {
        auto out = open_out(out_dir / "reward_curve.csv");
        out << "episode,mean_cum_reward,std\n";
        for (std::size_t e = 0; e < s.reward_curve.mean.size(); ++e)
        {
            out << e << ',' << csv::format_double(s.reward_curve.mean[e]) << ','
                << csv::format_double(s.reward_curve.std[e]) << '\n';
        }
    }
    {
        auto out = open_out(out_dir / "rounds.csv");
        out << "round,seed,eval_se_total,top1\n";
        for (const auto& r : s.rounds)
        {
            const double top1 = r.rankings.empty() ? 0.0 : top_k_accuracy(r.rankings, r.oracle_labels, 1);
            out << r.round << ',' << r.seed << ',' << csv::format_double(r.eval_se) << ','
                << csv::format_double(top1) << '\n';
        }
    }
    if (write_logs)
    {
        ensure_dir(out_dir / "episode_logs");
        for (const auto& r : s.rounds)
        {
            write_episode_log(r.logs, out_dir / "episode_logs" / fmt::format("round_{:02}.csv", r.round));
        }
    }
    write_manifest(config, "run", out_dir,
                   {{"outputs", {"reward_curve.csv", "rounds.csv", "episode_logs/"}}});
    return s;
}

std::vector<SweepRow> sweep_users(const ExperimentConfig& config, const std::vector<std::size_t>& n_ues,
                                  const std::filesystem::path& out_dir)
{
    if (n_ues.empty())
    {
        throw ConfigError("sweep: empty user list");
    }
    for (auto n : n_ues)
    {
        if (n < 1)
        {
            throw ConfigError("sweep: every N_ue must be at least 1");
        }
    }
    if (!config.scene_csv.empty())
    {
        throw ConfigError("sweep: cannot vary the user count of an imported scene");
    }
    if (config.eval_ticks < 1)
    {
        throw ConfigError("sweep: needs eval_ticks >= 1");
    }
    config.validate();
    ensure_dir(out_dir);

    std::vector<SweepRow> rows;
    for (auto n : n_ues)
    {
        auto c = config;
        c.scene.n_ue = n;
        SweepRow row;
        row.n_ue = n;
        const auto collect = [&](Method m, std::vector<double>& per_round) {
            double sum = 0.0;
            for (const auto& r : run_rounds(c, m))
            {
                per_round.push_back(r.eval_se);
                sum += r.eval_se;
            }
            return sum / static_cast<double>(per_round.size());
        };
        row.se_mmt_rl = collect(Method::kMmtRl, row.rounds_mmt_rl);
        row.se_mmt = collect(Method::kMmtOnly, row.rounds_mmt);
        row.se_rl = collect(Method::kRlOnly, row.rounds_rl);
        rows.push_back(std::move(row));
    }

    {
        auto out = open_out(out_dir / "se_vs_users.csv");
        out << "n_ue,se_mmt_rl,se_mmt,se_rl\n";
        for (const auto& r : rows)
        {
            out << r.n_ue << ',' << csv::format_double(r.se_mmt_rl) << ',' << csv::format_double(r.se_mmt) << ','
                << csv::format_double(r.se_rl) << '\n';
        }
    }
    {
        auto out = open_out(out_dir / "se_vs_users_rounds.csv");
        out << "n_ue,round,se_mmt_rl,se_mmt,se_rl\n";
        for (const auto& r : rows)
        {
            for (std::size_t i = 0; i < r.rounds_mmt_rl.size(); ++i)
            {
                out << r.n_ue << ',' << i << ',' << csv::format_double(r.rounds_mmt_rl[i]) << ','
                    << csv::format_double(r.rounds_mmt[i]) << ',' << csv::format_double(r.rounds_rl[i]) << '\n';
            }
        }
    }
    json users = json::array();
    for (auto n : n_ues)
    {
        users.push_back(n);
    }
    write_manifest(config, "sweep-users", out_dir,
                   {{"n_ue", users}, {"outputs", {"se_vs_users.csv", "se_vs_users_rounds.csv"}}});
    return rows;
}

AccuracyReport accuracy(const ExperimentConfig& config, std::size_t k_max, const std::filesystem::path& out_dir)
{
    const auto cb = config.codebook();
    if (k_max < 1 || k_max > cb.n_beams())
    {
        throw ConfigError(fmt::format("accuracy: k_max = {} outside [1, {}]", k_max, cb.n_beams()));
    }
    if (config.eval_ticks < 1)
    {
        throw ConfigError("accuracy: needs eval_ticks >= 1");
    }
    config.validate();
    ensure_dir(out_dir);

    struct Pooled
    {
        std::vector<std::vector<BeamIndex>> rankings;
        std::vector<BeamIndex> labels;
        double seconds = 0.0;
        std::size_t steps = 0;
        std::size_t group_hits = 0;
        std::size_t group_samples = 0;
    };
    const auto pool = [&](Method m) {
        Pooled p;
        for (auto& r : run_rounds(config, m))
        {
            std::move(r.rankings.begin(), r.rankings.end(), std::back_inserter(p.rankings));
            p.labels.insert(p.labels.end(), r.oracle_labels.begin(), r.oracle_labels.end());
            p.seconds += r.step_seconds;
            p.steps += r.steps;
            p.group_hits += r.group_hits;
            p.group_samples += r.group_samples;
        }
        return p;
    };
    const auto mmt_rl = pool(Method::kMmtRl);
    const auto mmt = pool(Method::kMmtOnly);
    const auto rl = pool(Method::kRlOnly);

    AccuracyReport rep;
    for (std::size_t k = 1; k <= k_max; ++k)
    {
        rep.rows.push_back({k, top_k_accuracy(mmt_rl.rankings, mmt_rl.labels, k),
                            top_k_accuracy(mmt.rankings, mmt.labels, k), top_k_accuracy(rl.rankings, rl.labels, k)});
    }
    rep.step_ms_mmt_rl = mmt_rl.steps ? 1e3 * mmt_rl.seconds / static_cast<double>(mmt_rl.steps) : 0.0;
    rep.step_ms_rl = rl.steps ? 1e3 * rl.seconds / static_cast<double>(rl.steps) : 0.0;
    rep.group_top1 = mmt_rl.group_samples
                         ? static_cast<double>(mmt_rl.group_hits) / static_cast<double>(mmt_rl.group_samples)
                         : 0.0;

    {
        auto out = open_out(out_dir / "topk.csv");
        out << "k,acc_mmt_rl,acc_mmt,acc_rl\n";
        for (const auto& r : rep.rows)
        {
            out << r.k << ',' << csv::format_double(r.acc_mmt_rl) << ',' << csv::format_double(r.acc_mmt) << ','
                << csv::format_double(r.acc_rl) << '\n';
        }
    }
    write_manifest(config, "accuracy", out_dir, {{"k_max", k_max}, {"outputs", {"topk.csv"}}});
    return rep;
}

void calibrate(const ExperimentConfig& config, std::size_t ticks, const std::filesystem::path& out_dir)
{
    config.validate();
    if (ticks < 1)
    {
        throw ConfigError("calibrate: needs at least one tick");
    }
    ensure_dir(out_dir);
    const BeamCodebook cb = config.codebook();
    const std::uint64_t seed = round_seed(config.seed, 0);
    Scene scene = initial_scene(config, seed);
    Clock clock{config.mmt_period_ms, config.rl_step_ms};
    Rng mobility_rng(stream_seed(seed, kMobilityStream));

    write_scene_csv(scene, out_dir / "scene.csv");
    write_codebook_csv(cb, out_dir / "codebook.csv");
    auto labels = open_out(out_dir / "labels.csv");
    auto traj = open_out(out_dir / "trajectory.csv");
    labels << "tick,ue_id,group\n";
    traj << "tick,ue_id,loc_index,x_m,y_m\n";
    for (std::size_t t = 0; t < ticks; ++t)
    {
        if (t > 0)
        {
            advance_mmt_tick(scene, clock, mobility_rng, config.scene.mobility);
        }
        const auto oracle = joint_oracle(scene, config.channel, cb);
        for (UeIndex u = 0; u < scene.n_ue(); ++u)
        {
            labels << t << ',' << u << ',' << cb.group_of(oracle.assignment[u]) << '\n';
            const auto& p = scene.ues[u].position;
            traj << t << ',' << u << ',' << scene.ues[u].location_index << ',' << csv::format_double(p.x) << ','
                 << csv::format_double(p.y) << '\n';
        }
    }
    write_manifest(config, "calibrate", out_dir,
                   {{"ticks", ticks}, {"outputs", {"labels.csv", "trajectory.csv", "scene.csv", "codebook.csv"}}});
}

} // namespace beamsim
