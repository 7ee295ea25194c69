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


#include "ephemix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ephemix/errors.hpp"

namespace ephemix {

namespace {

constexpr double kFloorSlack = 1e-9;

std::int64_t floor_units(double v) {
    return std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(v + kFloorSlack)), 0);
}

double sample_sd(std::span<const TraceSample> h, double TraceSample::*field) {
    double mean = 0.0;
    for (const auto& s : h) {
        mean += s.*field;
    }
    mean /= static_cast<double>(h.size());
    double ss = 0.0;
    for (const auto& s : h) {
        const double d = s.*field - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(h.size() - 1));
}

}  // namespace

void validate(const MarginPolicy& policy) {
    if (!(policy.fixed_fraction >= 0.0 && policy.fixed_fraction <= 1.0)) {
        throw ValidationError("fixed_fraction must lie in [0,1]");
    }
    if (!(policy.scavenger_k >= 0.0) || !std::isfinite(policy.scavenger_k)) {
        throw ValidationError("scavenger_k must be non-negative");
    }
    if (policy.history_window < 2) {
        throw ValidationError("history_window must be at least 2");
    }
}

std::int64_t allocatable_units_fixed(std::int64_t capacity, const MarginPolicy& policy) {
    if (capacity <= 0) {
        return 0;
    }
    return floor_units(static_cast<double>(capacity) * (1.0 - policy.fixed_fraction));
}

double scavenger_margin(std::span<const TraceSample> history, const MarginPolicy& policy) {
    if (history.size() > policy.history_window) {
        history = history.last(policy.history_window);
    }
    if (history.size() < 2) {
        throw ValidationError("scavenger margin needs at least 2 history samples, got " +
                              std::to_string(history.size()));
    }
    const double sd = std::max(sample_sd(history, &TraceSample::cpu_used), sample_sd(history, &TraceSample::mem_used));
    return std::clamp(policy.scavenger_k * sd, 0.0, 1.0);
}

std::int64_t allocatable_units_scavenger(std::span<const TraceSample> history, std::int64_t free_units,
                                         const MarginPolicy& policy) {
    const double m = scavenger_margin(history, policy);
    if (free_units <= 0) {
        return 0;
    }
    return floor_units(static_cast<double>(free_units) * (1.0 - m));
}

EpisodeResult run_baseline_episode(const MarginPolicy& policy, const TraceWindow& window,
                                   std::span<const TraceSample> history, const EnvConfig& env,
                                   const PenaltySchedule& schedule, std::uint64_t request_seed,
                                   std::vector<StepRecord>* log) {
    validate(policy);
    validate(env);
    if (window.samples.empty()) {
        throw ValidationError("baseline episode on an empty window");
    }
    // Rolling history: tail of the preceding samples followed by this window's past steps.
    std::vector<TraceSample> past;
    if (policy.kind == MarginPolicy::Kind::Scavenger) {
        const std::size_t keep = std::min(history.size(), policy.history_window);
        past.assign(history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
        past.reserve(keep + window.size());
    }

    std::mt19937_64 rng(request_seed);
    EpisodeAccumulator acc(env.cost);
    if (log) {
        log->clear();
    }
    for (std::size_t t = 0; t < window.size(); ++t) {
        const std::int64_t request = draw_request(env.request, window, t, env.unit, rng);
        const std::int64_t capacity = units_from_prediction(window, t, env.unit);
        std::int64_t allocatable = 0;
        if (policy.kind == MarginPolicy::Kind::Fixed) {
            allocatable = allocatable_units_fixed(capacity, policy);
        } else if (past.size() >= 2) {
            allocatable = allocatable_units_scavenger(past, capacity, policy);
        }
        const std::int64_t accepted = std::min(request, allocatable);
        const std::int64_t actual = units_from_actual(window, t, env.unit);
        const std::int64_t lost = std::max<std::int64_t>(accepted - actual, 0);

        StepRecord r;
        r.t = t;
        r.actions = "AE*" + std::to_string(accepted);
        r.alloc_e = accepted - lost;
        r.rem = lost;
        r.lost_units = lost;
        r.request = request;
        r.reward = step_reward(r.alloc_e, 0, r.rem, env.cost);
        r.violated = lost > 0;
        acc.add(r);
        if (log) {
            log->push_back(std::move(r));
        }
        if (policy.kind == MarginPolicy::Kind::Scavenger) {
            past.push_back(window.samples[t]);
        }
    }
    return acc.finish(schedule);
}

}  // namespace ephemix
