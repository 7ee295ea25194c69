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


#ifndef EPHEMIX_HARNESS_HPP
#define EPHEMIX_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ephemix/agent.hpp"
#include "ephemix/config.hpp"
#include "ephemix/metrics.hpp"

namespace ephemix {

/// Trace windows in chronological order; the first n_train are for training.
struct ExperimentData {
    std::vector<TraceWindow> windows;
    std::size_t n_train = 0;

    std::span<const TraceWindow> train() const { return std::span(windows).first(n_train); }
    std::span<const TraceWindow> test() const { return std::span(windows).subspan(n_train); }
};

/// floor(n * fraction).
std::size_t train_count(std::size_t n, double fraction);

/// Loads or generates the configured traces and splits them. Throws ConfigError when
/// either side of the split would be empty.
ExperimentData prepare_data(const ExperimentConfig& cfg);

/// Volatility carried into window i: the estimate over window i-1, or 1.0 for the first.
double volatility_prior(std::span<const TraceWindow> windows, std::size_t i);

std::int64_t stable_capacity(const StableCapacityRule& rule, const TraceWindow& window, const ResourceUnit& unit);

/// Seed of the request stream for window i; shared by every policy evaluated on it.
std::uint64_t request_seed(std::uint64_t base, std::size_t i);

/// Plays one window with the agent. When `learn` is set, every micro-action is stored
/// as a transition (reward 0 inside a step, the step reward on the one that closes it)
/// followed by one learn() call.
EpisodeResult run_agent_episode(DqnAgent& agent, const EnvConfig& env, const PenaltySchedule& schedule,
                                const TraceWindow& window, std::int64_t stable_cap, double p, bool learn,
                                std::uint64_t req_seed, std::vector<StepRecord>* log = nullptr,
                                double* mean_loss = nullptr);

struct CurvePoint {
    std::size_t episode = 0;
    std::size_t window = 0;
    double epsilon = 0.0;
    EpisodeResult result;
    double mean_loss = 0.0;
};

struct TrainingRun {
    std::uint64_t seed = 0;
    DqnAgent agent;
    std::vector<CurvePoint> curve;
};

/// Trains one agent for cfg.episodes episodes, cycling through the training windows.
TrainingRun train_agent(const ExperimentConfig& cfg, const ExperimentData& data, std::uint64_t seed,
                        std::ostream* progress = nullptr);

void write_learning_curve(std::ostream& out, std::span<const CurvePoint> curve);

/// Trains every configured seed and writes checkpoint_seed<S>.txt and
/// learning_curve_seed<S>.csv into `out_dir`. Returns the checkpoint paths.
std::vector<std::filesystem::path> run_training(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                                std::ostream* progress = nullptr);

struct PolicyEvaluation {
    PolicyKind policy = PolicyKind::Agent;
    std::vector<EpisodeResult> days;
    std::vector<std::vector<StepRecord>> logs;
    Summary summary;
};

/// Plays every test window once. The agent acts greedily apart from epsilon_min
/// exploration and does not learn; `agent` is required only for PolicyKind::Agent.
PolicyEvaluation evaluate_policy(const ExperimentConfig& cfg, const ExperimentData& data, PolicyKind policy,
                                 DqnAgent* agent, bool keep_logs = false);

/// Evaluates cfg.policy; writes eval_days.csv, eval_events.csv and eval_summary.txt.
PolicyEvaluation run_evaluation(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                                const std::filesystem::path& out_dir);

/// Agent, Fixed and Scavenger on the same test windows; writes comparison.csv,
/// comparison_days.csv, events_<policy>.csv and comparison_summary.txt.
std::vector<PolicyEvaluation> run_comparison(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                                             const std::filesystem::path& out_dir);

/// Header: policy,profit,violation_min,ephem_unit_hours,stable_pct (means over days).
void write_comparison(std::ostream& out, std::span<const PolicyEvaluation> arms);

}  // namespace ephemix

#endif  // EPHEMIX_HARNESS_HPP
