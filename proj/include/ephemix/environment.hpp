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

#ifndef EPHEMIX_ENVIRONMENT_HPP
#define EPHEMIX_ENVIRONMENT_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ephemix/economics.hpp"
#include "ephemix/traces.hpp"

namespace ephemix {

/// Allocation granule: a bundle of vCPUs and memory sold as one unit.
struct ResourceUnit {
    int vcpu = 2;
    int mem_gb = 8;
};

enum class Action : int {
    AllocEphemeral = 0,
    RemoveEphemeral = 1,
    AllocStable = 2,
    RemoveStable = 3,
    Noop = 4,
};

inline constexpr int kActionCount = 5;
inline constexpr std::size_t kStateSize = 6;

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::AllocEphemeral, Action::RemoveEphemeral, Action::AllocStable, Action::RemoveStable, Action::Noop};

std::string_view to_string(Action a);
/// Short code used in event logs: AE, RE, AS, RS, N.
std::string_view short_code(Action a);

/// Observation of both pools. `request` is the customer demand behind `rem`; it is
/// carried for bookkeeping and is not part of the encoded observation.
struct EnvState {
    std::int64_t rem = 0;
    std::int64_t alloc_e = 0;
    std::int64_t alloc_s = 0;
    std::int64_t avail_e = 0;
    std::int64_t avail_s = 0;
    double p = 0.0;
    std::int64_t request = 0;

    std::int64_t allocated() const { return alloc_e + alloc_s; }
    bool operator==(const EnvState&) const = default;
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    std::int64_t lost_units = 0;
    bool violated = false;
    bool terminal = false;
};

/// Within one time step, decisions happen first against the forecast (Allocation);
/// after reclamation the agent may react with stable units only (Recovery).
enum class Phase { Allocation, Recovery };

struct RequestPolicy {
    enum class Kind { AllAvailable, Fixed, Poisson };
    Kind kind = Kind::AllAvailable;
    std::int64_t units = 0;  // Fixed
    double mean = 0.0;       // Poisson
};

struct EnvConfig {
    ResourceUnit unit;
    CostModel cost;
    RequestPolicy request;
    int k_max = 32;
    bool recovery_phase = true;
    // Offer the agent only actions that change the state (plus Noop).
    bool mask_invalid_actions = true;
    // Within one decision phase a pool may only grow or only shrink: the reverse of
    // an action already taken on that pool is masked until the phase ends.
    bool monotone_phases = true;
};

void validate(const ResourceUnit& unit);
void validate(const EnvConfig& cfg);

/// Units that fit in the host's free capacity under the given utilization fractions.
std::int64_t units_free(const HostSpec& host, double cpu_util, double mem_util, const ResourceUnit& unit = {});
/// Units the forecast says are free at step t.
std::int64_t units_from_prediction(const TraceWindow& window, std::size_t t, const ResourceUnit& unit = {});
/// Units actually free at step t (what reclamation enforces).
std::int64_t units_from_actual(const TraceWindow& window, std::size_t t, const ResourceUnit& unit = {});
/// Largest forecast capacity over the window; the ephemeral pool size used for encoding.
std::int64_t peak_predicted_units(const TraceWindow& window, const ResourceUnit& unit = {});
/// ceil(fraction * peak_predicted_units).
std::int64_t stable_capacity_for(const TraceWindow& window, double fraction, const ResourceUnit& unit = {});

/// Applies one micro-action. Invalid actions (empty pool, nothing to remove, ephemeral
/// actions during recovery) return the state unchanged.
EnvState apply_action(const EnvState& state, Action a, Phase phase = Phase::Allocation);

/// Bitmask (bit i = action i) of the actions that would change `state` in `phase`.
/// Noop is always included.
using ActionMask = std::uint8_t;
inline constexpr ActionMask kAllActionsMask = 0x1F;
ActionMask valid_actions(const EnvState& state, Phase phase = Phase::Allocation);

/// Tracks the direction each pool has moved in during the current phase.
class PhaseDirections {
public:
    void reset() { e_ = s_ = 0; }
    void record(Action a);
    /// Actions that would reverse an earlier move of the same phase are cleared.
    ActionMask filter(ActionMask mask) const;

private:
    int e_ = 0;
    int s_ = 0;
};

using DecisionSource = std::function<Action(const EnvState&)>;

/// Queries `source` and applies its actions until it answers Noop or `k_max` actions
/// were taken. Returns the sequence taken, including the final Noop if any.
std::vector<Action> decide_step(EnvState& state, const DecisionSource& source, int k_max,
                                Phase phase = Phase::Allocation);

/// Customer demand at step t. Only the Poisson policy consumes `rng`.
std::int64_t draw_request(const RequestPolicy& policy, const TraceWindow& window, std::size_t t,
                          const ResourceUnit& unit, std::mt19937_64& rng);

/// Clamps the ephemeral allocation to `capacity` units. Returns the units lost.
std::int64_t reclaim(EnvState& state, std::int64_t capacity);

/// Settles step t against the actual utilization: reclamation, reward and violation on
/// the post-loss state, with no recovery phase.
StepOutcome advance_time(const EnvState& state, const TraceWindow& window, std::size_t t,
                         const CostModel& model, const ResourceUnit& unit = {});

/// Six-component observation; counts scaled by their pool capacity, rem by the sum of
/// both capacities, p passed through.
std::array<double, kStateSize> encode_state(const EnvState& state, std::int64_t e_capacity,
                                            std::int64_t s_capacity);

/// Stateful episode driver over one trace window.
class Environment {
public:
    explicit Environment(EnvConfig cfg);

    /// Starts an episode at step 0 with an empty allocation. `p` is the volatility
    /// estimate carried into the window.
    const EnvState& reset(const TraceWindow& window, std::int64_t stable_capacity, double p,
                          std::uint64_t seed = 0);

    const EnvState& state() const { return state_; }
    Phase phase() const { return phase_; }
    std::size_t step() const { return t_; }
    bool done() const { return done_; }
    const EnvConfig& config() const { return cfg_; }
    std::int64_t ephemeral_capacity() const { return e_capacity_; }
    std::int64_t stable_capacity() const { return s_capacity_; }

    std::array<double, kStateSize> observe() const;
    ActionMask valid_actions() const;

    void apply(Action a);
    /// Runs the decision loop for the current phase.
    std::vector<Action> decide(const DecisionSource& source);
    /// Ends the allocation phase: enforces the actual capacity of the current step.
    std::int64_t reclaim_now();
    /// Ends the step: reward and violation on the current state, then moves on to the
    /// next step's forecast unless this was the last one. `next_state` in the outcome is
    /// the settled state of this step.
    StepOutcome settle();

private:
    void begin_step();

    EnvConfig cfg_;
    const TraceWindow* window_ = nullptr;
    EnvState state_;
    Phase phase_ = Phase::Allocation;
    std::size_t t_ = 0;
    bool done_ = true;
    std::int64_t e_capacity_ = 0;
    std::int64_t s_capacity_ = 0;
    std::int64_t lost_this_step_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace ephemix

#endif  // EPHEMIX_ENVIRONMENT_HPP
