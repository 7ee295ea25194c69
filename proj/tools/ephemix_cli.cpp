// Copyright 2026 The Ephemix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: trace generation, training, evaluation and comparison.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ephemix/config.hpp"
#include "ephemix/harness.hpp"
#include "ephemix/traces.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"ephemix: mixed ephemeral/stable resource allocation simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 7;
    int days = 1;
    double p_true = 0.5;
    std::string out_file;
    auto* gen = app.add_subcommand("gen-traces", "Write a synthetic trace CSV");
    gen->add_option("--seed", seed, "Generator seed")->required();
    gen->add_option("--days", days, "Number of 24-hour windows")->required()->check(CLI::PositiveNumber);
    gen->add_option("--p-true", p_true, "Per-step underestimation probability")->required();
    gen->add_option("--out", out_file, "Output CSV path")->required();

    std::string config_path;
    std::string out_dir;
    std::string checkpoint;
    auto* train = app.add_subcommand("train", "Train one agent per configured seed");
    train->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    train->add_option("--out", out_dir, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate the configured policy on the test windows");
    eval->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    eval->add_option("--checkpoint", checkpoint, "Agent checkpoint (agent policy only)");
    eval->add_option("--out", out_dir, "Output directory")->required();

    auto* compare = app.add_subcommand("compare", "Compare agent, Fixed and Scavenger on the test windows");
    compare->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    compare->add_option("--checkpoint", checkpoint, "Agent checkpoint")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ephemix::GeneratorProfile profile;
            profile.p_true = p_true;
            const auto windows = ephemix::generate_synthetic(seed, days, profile);
            const fs::path path(out_file);
            if (path.has_parent_path()) {
                fs::create_directories(path.parent_path());
            }
            ephemix::write_traces(path, windows);
            std::cout << "wrote " << windows.size() * profile.window_len << " samples to " << out_file << '\n';
        } else if (train->parsed()) {
            const auto cfg = ephemix::load_config(config_path);
            const auto checkpoints = ephemix::run_training(cfg, out_dir, &std::cerr);
            for (const auto& c : checkpoints) {
                std::cout << "checkpoint " << c.string() << '\n';
            }
        } else if (eval->parsed()) {
            const auto cfg = ephemix::load_config(config_path);
            const auto result = ephemix::run_evaluation(cfg, checkpoint, out_dir);
            ephemix::write_summary(std::cout, ephemix::to_string(cfg.policy), result.summary);
        } else if (compare->parsed()) {
            const auto cfg = ephemix::load_config(config_path);
            const auto arms = ephemix::run_comparison(cfg, checkpoint, out_dir);
            ephemix::write_comparison(std::cout, arms);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
