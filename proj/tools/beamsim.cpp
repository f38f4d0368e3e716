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

#include "beamsim/errors.hpp"
#include "beamsim/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Common
{
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rounds;
    std::optional<std::string> method;
    std::optional<std::string> predictions;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config_path, "JSON experiment config (defaults apply when omitted)");
    app->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--rounds", c.rounds, "Monte Carlo rounds");
    app->add_option("--method", c.method, "mmt-rl | rl-only | mmt-only");
    app->add_option("--predictions", c.predictions, "Prediction-stream CSV for the file group predictor");
}

beamsim::ExperimentConfig resolve(const Common& c)
{
    beamsim::ExperimentConfig cfg;
    if (!c.config_path.empty())
    {
        cfg = beamsim::load_config(c.config_path);
    }
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.rounds)
        cfg.rounds = *c.rounds;
    if (c.method)
        cfg.method = beamsim::parse_method(*c.method);
    if (c.predictions)
    {
        cfg.predictor = "file";
        cfg.predictions_csv = *c.predictions;
    }
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-step mm-wave beam management simulator"};
    app.set_version_flag("--version", beamsim::kVersion);
    app.require_subcommand(1);

    Common run_opts;
    auto* run = app.add_subcommand("run", "Train one method and write reward curves and logs");
    add_common(run, run_opts);
    bool no_logs = false;
    run->add_flag("--no-logs", no_logs, "Skip per-step episode logs");

    Common sweep_opts;
    std::vector<std::size_t> users{5, 10, 15, 20, 25};
    auto* sweep = app.add_subcommand("sweep-users", "Spectral efficiency of all methods against user count");
    add_common(sweep, sweep_opts);
    sweep->add_option("--users", users, "User counts")->delimiter(',')->capture_default_str();

    Common acc_opts;
    std::size_t k_max = 5;
    auto* acc = app.add_subcommand("accuracy", "Top-k beam selection accuracy of all methods");
    add_common(acc, acc_opts);
    acc->add_option("--k-max", k_max, "Largest k")->capture_default_str();

    Common cal_opts;
    std::size_t ticks = 100;
    auto* cal = app.add_subcommand("calibrate", "Export oracle group labels, trajectory, scene and codebook");
    add_common(cal, cal_opts);
    cal->add_option("--ticks", ticks, "Number of ticks")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*run)
        {
            const auto cfg = resolve(run_opts);
            const auto summary = beamsim::run_experiment(cfg, run_opts.out_dir, !no_logs);
            const auto& mean = summary.reward_curve.mean;
            fmt::print("{} rounds x {} episodes ({}), final mean cumulative reward {:.3f}\n", cfg.rounds,
                       cfg.episodes, beamsim::to_string(cfg.method), mean.empty() ? 0.0 : mean.back());
        }
        else if (*sweep)
        {
            const auto cfg = resolve(sweep_opts);
            const auto rows = beamsim::sweep_users(cfg, users, sweep_opts.out_dir);
            fmt::print("{:>5} {:>12} {:>12} {:>12}\n", "n_ue", "mmt-rl", "mmt-only", "rl-only");
            for (const auto& r : rows)
            {
                fmt::print("{:>5} {:>12.4f} {:>12.4f} {:>12.4f}\n", r.n_ue, r.se_mmt_rl, r.se_mmt, r.se_rl);
            }
        }
        else if (*acc)
        {
            const auto cfg = resolve(acc_opts);
            const auto rep = beamsim::accuracy(cfg, k_max, acc_opts.out_dir);
            fmt::print("{:>3} {:>9} {:>9} {:>9}\n", "k", "mmt-rl", "mmt-only", "rl-only");
            for (const auto& r : rep.rows)
            {
                fmt::print("{:>3} {:>9.4f} {:>9.4f} {:>9.4f}\n", r.k, r.acc_mmt_rl, r.acc_mmt, r.acc_rl);
            }
            fmt::print("group top-1 (mmt-rl): {:.4f}\n", rep.group_top1);
            fmt::print("RL step time: mmt-rl {:.4f} ms, rl-only {:.4f} ms\n", rep.step_ms_mmt_rl, rep.step_ms_rl);
        }
        else if (*cal)
        {
            const auto cfg = resolve(cal_opts);
            beamsim::calibrate(cfg, ticks, cal_opts.out_dir);
            fmt::print("wrote {} ticks to {}\n", ticks, cal_opts.out_dir);
        }
    }
    catch (const beamsim::IoError& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    }
    return 0;
}
