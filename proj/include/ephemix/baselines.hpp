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


#ifndef EPHEMIX_BASELINES_HPP
#define EPHEMIX_BASELINES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ephemix/environment.hpp"
#include "ephemix/metrics.hpp"

namespace ephemix {

/// Safety-margin policies that sell only ephemeral units.
struct MarginPolicy {
    enum class Kind { Fixed, Scavenger };
    Kind kind = Kind::Fixed;
    double fixed_fraction = 0.05;
    double scavenger_k = 1.0;
    std::size_t history_window = kDefaultWindowLength;
};

void validate(const MarginPolicy& policy);

/// floor(capacity * (1 - fixed_fraction)).
std::int64_t allocatable_units_fixed(std::int64_t capacity, const MarginPolicy& policy);

/// clamp(k * max(sd_cpu, sd_mem), 0, 1) over the last history_window samples of actual
/// usage, using the sample standard deviation. Needs at least two samples.
double scavenger_margin(std::span<const TraceSample> history, const MarginPolicy& policy);

/// floor(free_units * (1 - scavenger_margin(history))).
std::int64_t allocatable_units_scavenger(std::span<const TraceSample> history, std::int64_t free_units,
                                         const MarginPolicy& policy);

/// Plays one window with a margin policy. At each step the policy accepts
/// min(request, allocatable) units of the forecast capacity, then loses whatever the
/// actual capacity cannot hold; those losses are the only source of violations.
/// `history` holds the samples preceding the window (oldest first); the Scavenger
/// margin looks back across it. Steps with fewer than two history samples allocate 0.
EpisodeResult run_baseline_episode(const MarginPolicy& policy, const TraceWindow& window,
                                   std::span<const TraceSample> history, const EnvConfig& env,
                                   const PenaltySchedule& schedule, std::uint64_t request_seed = 0,
                                   std::vector<StepRecord>* log = nullptr);

}  // namespace ephemix

#endif  // EPHEMIX_BASELINES_HPP
