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

#include "ephemix/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ephemix/errors.hpp"

namespace ephemix {

namespace {

// Absorbs representation error in products like 10 * (1 - 0.3) before flooring.
constexpr double kFloorSlack = 1e-9;

std::int64_t shortfall(const EnvState& s) { return std::max<std::int64_t>(s.request - s.allocated(), 0); }

}  // namespace

std::string_view to_string(Action a) {
    switch (a) {
        case Action::AllocEphemeral: return "AllocEphemeral";
        case Action::RemoveEphemeral: return "RemoveEphemeral";
        case Action::AllocStable: return "AllocStable";
        case Action::RemoveStable: return "RemoveStable";
        case Action::Noop: return "Noop";
    }
    return "?";
}

std::string_view short_code(Action a) {
    switch (a) {
        case Action::AllocEphemeral: return "AE";
        case Action::RemoveEphemeral: return "RE";
        case Action::AllocStable: return "AS";
        case Action::RemoveStable: return "RS";
        case Action::Noop: return "N";
    }
    return "?";
}

void validate(const ResourceUnit& unit) {
    if (unit.vcpu <= 0 || unit.mem_gb <= 0) {
        throw ValidationError("resource unit dimensions must be positive");
    }
}

void validate(const EnvConfig& cfg) {
    validate(cfg.unit);
    validate(cfg.cost);
    if (cfg.k_max < 1) {
        throw ValidationError("k_max must be at least 1");
    }
    if (cfg.request.kind == RequestPolicy::Kind::Fixed && cfg.request.units < 0) {
        throw ValidationError("fixed request must be non-negative");
    }
    if (cfg.request.kind == RequestPolicy::Kind::Poisson && !(cfg.request.mean >= 0.0)) {
        throw ValidationError("Poisson request mean must be non-negative");
    }
}

std::int64_t units_free(const HostSpec& host, double cpu_util, double mem_util, const ResourceUnit& unit) {
    const double free_cpu = host.cpu_cores * (1.0 - cpu_util);
    const double free_mem = host.mem_gb * (1.0 - mem_util);
    const double units = std::min(free_cpu / unit.vcpu, free_mem / unit.mem_gb);
    return std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(units + kFloorSlack)), 0);
}

std::int64_t units_from_prediction(const TraceWindow& window, std::size_t t, const ResourceUnit& unit) {
    const auto& s = window.samples.at(t);
    return units_free(window.host, s.cpu_pred, s.mem_pred, unit);
}

std::int64_t units_from_actual(const TraceWindow& window, std::size_t t, const ResourceUnit& unit) {
    const auto& s = window.samples.at(t);
    return units_free(window.host, s.cpu_used, s.mem_used, unit);
}

std::int64_t peak_predicted_units(const TraceWindow& window, const ResourceUnit& unit) {
    std::int64_t peak = 0;
    for (std::size_t t = 0; t < window.size(); ++t) {
        peak = std::max(peak, units_from_prediction(window, t, unit));
    }
    return peak;
}

std::int64_t stable_capacity_for(const TraceWindow& window, double fraction, const ResourceUnit& unit) {
    if (!(fraction >= 0.0)) {
        throw ValidationError("stable capacity fraction must be non-negative");
    }
    return static_cast<std::int64_t>(std::ceil(fraction * static_cast<double>(peak_predicted_units(window, unit)) -
                                               kFloorSlack));
}

EnvState apply_action(const EnvState& state, Action a, Phase phase) {
    EnvState s = state;
    switch (a) {
        case Action::AllocEphemeral:
            if (phase == Phase::Recovery || s.avail_e <= 0) {
                return state;
            }
            --s.avail_e;
            ++s.alloc_e;
            s.rem = std::max<std::int64_t>(s.rem - 1, 0);
            return s;
        case Action::RemoveEphemeral:
            if (phase == Phase::Recovery || s.alloc_e <= 0) {
                return state;
            }
            --s.alloc_e;
            ++s.avail_e;
            if (s.allocated() < s.request) {
                ++s.rem;
            }
            return s;
        case Action::AllocStable:
            if (s.avail_s <= 0) {
                return state;
            }
            --s.avail_s;
            ++s.alloc_s;
            s.rem = std::max<std::int64_t>(s.rem - 1, 0);
            return s;
        case Action::RemoveStable:
            if (s.alloc_s <= 0) {
                return state;
            }
            --s.alloc_s;
            ++s.avail_s;
            if (s.allocated() < s.request) {
                ++s.rem;
            }
            return s;
        case Action::Noop:
            return state;
    }
    return state;
}

ActionMask valid_actions(const EnvState& s, Phase phase) {
    ActionMask m = 1u << static_cast<int>(Action::Noop);
    if (phase == Phase::Allocation) {
        if (s.avail_e > 0) m |= 1u << static_cast<int>(Action::AllocEphemeral);
        if (s.alloc_e > 0) m |= 1u << static_cast<int>(Action::RemoveEphemeral);
    }
    if (s.avail_s > 0) m |= 1u << static_cast<int>(Action::AllocStable);
    if (s.alloc_s > 0) m |= 1u << static_cast<int>(Action::RemoveStable);
    return m;
}

void PhaseDirections::record(Action a) {
    switch (a) {
        case Action::AllocEphemeral: e_ = 1; break;
        case Action::RemoveEphemeral: e_ = -1; break;
        case Action::AllocStable: s_ = 1; break;
        case Action::RemoveStable: s_ = -1; break;
        case Action::Noop: break;
    }
}

ActionMask PhaseDirections::filter(ActionMask mask) const {
    const auto bit = [](Action a) { return static_cast<ActionMask>(1u << static_cast<int>(a)); };
    if (e_ > 0) mask &= static_cast<ActionMask>(~bit(Action::RemoveEphemeral));
    if (e_ < 0) mask &= static_cast<ActionMask>(~bit(Action::AllocEphemeral));
    if (s_ > 0) mask &= static_cast<ActionMask>(~bit(Action::RemoveStable));
    if (s_ < 0) mask &= static_cast<ActionMask>(~bit(Action::AllocStable));
    return mask;
}

std::vector<Action> decide_step(EnvState& state, const DecisionSource& source, int k_max, Phase phase) {
    std::vector<Action> taken;
    while (static_cast<int>(taken.size()) < k_max) {
        const Action a = source(state);
        taken.push_back(a);
        if (a == Action::Noop) {
            break;
        }
        state = apply_action(state, a, phase);
    }
    return taken;
}

std::int64_t reclaim(EnvState& state, std::int64_t capacity) {
    const std::int64_t lost = std::max<std::int64_t>(state.alloc_e - capacity, 0);
    state.alloc_e -= lost;
    state.avail_e = std::max<std::int64_t>(capacity - state.alloc_e, 0);
    state.rem = shortfall(state);
    return lost;
}

StepOutcome advance_time(const EnvState& state, const TraceWindow& window, std::size_t t,
                         const CostModel& model, const ResourceUnit& unit) {
    if (t >= window.size()) {
        throw std::out_of_range("advance_time: step beyond window");
    }
    StepOutcome out;
    out.next_state = state;
    out.lost_units = reclaim(out.next_state, units_from_actual(window, t, unit));
    out.reward = step_reward(out.next_state.alloc_e, out.next_state.alloc_s, out.next_state.rem, model);
    out.violated = out.next_state.rem > 0;
    out.terminal = t + 1 == window.size();
    return out;
}

std::array<double, kStateSize> encode_state(const EnvState& s, std::int64_t e_capacity, std::int64_t s_capacity) {
    const auto ratio = [](std::int64_t num, std::int64_t den) {
        return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    return {ratio(s.rem, e_capacity + s_capacity),
            ratio(s.alloc_e, e_capacity),
            ratio(s.alloc_s, s_capacity),
            ratio(s.avail_e, e_capacity),
            ratio(s.avail_s, s_capacity),
            s.p};
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

const EnvState& Environment::reset(const TraceWindow& window, std::int64_t stable_capacity, double p,
                                   std::uint64_t seed) {
    if (window.samples.empty()) {
        throw ValidationError("cannot reset on an empty window");
    }
    if (stable_capacity < 0) {
        throw ValidationError("stable capacity must be non-negative");
    }
    window_ = &window;
    rng_.seed(seed);
    t_ = 0;
    done_ = false;
    phase_ = Phase::Allocation;
    e_capacity_ = std::max<std::int64_t>(peak_predicted_units(window, cfg_.unit), 1);
    s_capacity_ = stable_capacity;
    state_ = EnvState{};
    state_.avail_s = stable_capacity;
    state_.p = p;
    begin_step();
    return state_;
}

std::int64_t draw_request(const RequestPolicy& policy, const TraceWindow& window, std::size_t t,
                          const ResourceUnit& unit, std::mt19937_64& rng) {
    switch (policy.kind) {
        case RequestPolicy::Kind::AllAvailable:
            return units_from_prediction(window, t, unit);
        case RequestPolicy::Kind::Fixed:
            return policy.units;
        case RequestPolicy::Kind::Poisson: {
            std::poisson_distribution<std::int64_t> d(policy.mean);
            return d(rng);
        }
    }
    return 0;
}

void Environment::begin_step() {
    state_.request = draw_request(cfg_.request, *window_, t_, cfg_.unit, rng_);
    state_.avail_e = std::max<std::int64_t>(units_from_prediction(*window_, t_, cfg_.unit) - state_.alloc_e, 0);
    state_.rem = shortfall(state_);
    lost_this_step_ = 0;
    phase_ = Phase::Allocation;
}

std::array<double, kStateSize> Environment::observe() const {
    return encode_state(state_, e_capacity_, s_capacity_);
}

ActionMask Environment::valid_actions() const { return ephemix::valid_actions(state_, phase_); }

void Environment::apply(Action a) {
    if (done_) {
        throw std::logic_error("episode is over");
    }
    state_ = apply_action(state_, a, phase_);
}

std::vector<Action> Environment::decide(const DecisionSource& source) {
    if (done_) {
        throw std::logic_error("episode is over");
    }
    return decide_step(state_, source, cfg_.k_max, phase_);
}

std::int64_t Environment::reclaim_now() {
    if (done_ || phase_ != Phase::Allocation) {
        throw std::logic_error("reclaim outside the allocation phase");
    }
    lost_this_step_ = reclaim(state_, units_from_actual(*window_, t_, cfg_.unit));
    phase_ = Phase::Recovery;
    return lost_this_step_;
}

StepOutcome Environment::settle() {
    if (done_) {
        throw std::logic_error("episode is over");
    }
    if (phase_ == Phase::Allocation) {
        reclaim_now();
    }
    StepOutcome out;
    out.next_state = state_;
    out.lost_units = lost_this_step_;
    out.reward = step_reward(state_.alloc_e, state_.alloc_s, state_.rem, cfg_.cost);
    out.violated = state_.rem > 0;
    out.terminal = t_ + 1 == window_->size();
    if (out.terminal) {
        done_ = true;
    } else {
        ++t_;
        begin_step();
    }
    return out;
}

}  // namespace ephemix
