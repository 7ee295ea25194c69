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


#ifndef EPHEMIX_CONFIG_HPP
#define EPHEMIX_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ephemix/agent.hpp"
#include "ephemix/baselines.hpp"
#include "ephemix/economics.hpp"
#include "ephemix/environment.hpp"
#include "ephemix/traces.hpp"

namespace ephemix {

struct TraceSource {
    enum class Kind { Synthetic, File };
    Kind kind = Kind::Synthetic;
    std::filesystem::path path;  // File
    HostSpec host{64, 256};
    std::size_t window_len = kDefaultWindowLength;
    // Synthetic traces.
    GeneratorProfile profile;
    std::uint64_t seed = 7;
    int days = 100;
    // "trace" keeps the predictions stored with the samples; any other name
    // re-forecasts every window from its predecessor.
    std::string forecaster = "trace";
};

/// Stable pool size per window: a fixed unit count, or a fraction of the window's
/// peak forecast capacity (rounded up).
struct StableCapacityRule {
    double fraction = 0.25;
    std::optional<std::int64_t> units;
};

enum class PolicyKind { Agent, Fixed, Scavenger };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

struct ExperimentConfig {
    TraceSource traces;
    std::size_t episodes = 200;
    std::vector<std::uint64_t> seeds{1};
    double train_fraction = 0.8;
    PenaltySchedule penalties = PenaltySchedule::standard();
    EnvConfig env;
    StableCapacityRule stable;
    AgentConfig agent;
    MarginPolicy baseline;
    PolicyKind policy = PolicyKind::Agent;
};

/// Checks every field; throws ConfigError naming the offending key.
void validate(const ExperimentConfig& cfg);

/// Reads a JSON configuration. Relative trace paths resolve against the file's
/// directory. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// The effective configuration, every default spelled out, as JSON text.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace ephemix

#endif  // EPHEMIX_CONFIG_HPP
