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

#ifndef EPHEMIX_AGENT_HPP
#define EPHEMIX_AGENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ephemix/qnetwork.hpp"

namespace ephemix {

struct Experience {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
    // False for micro-actions inside one time step; those bootstrap with micro_gamma.
    bool closes_step = true;
    // Actions considered when bootstrapping from next_state (bit i = action i).
    std::uint8_t next_mask = 0x1F;
};

/// Fixed-capacity FIFO of transitions. Index 0 is the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20000);

    void push(Experience e);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return slots_.size(); }
    bool empty() const { return size_ == 0; }
    const Experience& operator[](std::size_t i) const;

    /// `count` distinct indices drawn uniformly (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t count, std::mt19937_64& rng) const;

private:
    std::vector<Experience> slots_;
    std::size_t head_ = 0;  // next write position
    std::size_t size_ = 0;
};

/// Multiplicative per-episode decay with a floor.
struct ExplorationSchedule {
    double epsilon = 1.0;
    double decay = 0.995;
    double epsilon_min = 0.01;

    void step() { epsilon = std::max(epsilon * decay, epsilon_min); }
};

struct AgentConfig {
    std::vector<std::size_t> widths{6, 24, 24, 5};
    TrainingConfig training;
    std::size_t replay_capacity = 20000;
    ExplorationSchedule exploration;
    // Learn-calls between copies of the online weights into the target network.
    std::uint64_t target_sync = 200;
    // Discount between micro-actions of the same time step. 1 makes the return
    // independent of how many micro-actions a step takes.
    double micro_gamma = 1.0;
    // Charged (before scaling) on every transition that does not close a step.
    double micro_action_cost = 0.0;
    // Multiplies rewards before they enter the replay buffer; reports are unaffected.
    double reward_scale = 1.0;
    // Adds g*phi(s') - phi(s) to every stored reward, where g is the transition's
    // discount and phi(s) = step_reward(s) / (1 - gamma), the return of holding s
    // forever. Leaves the optimal policy unchanged.
    bool potential_shaping = false;
};

void validate(const AgentConfig& cfg);

/// Deep Q-learning agent: epsilon-greedy acting, uniform experience replay and a
/// periodically synchronised target network.
class DqnAgent {
public:
    DqnAgent(AgentConfig cfg, std::uint64_t seed);

    /// Random action with probability epsilon, else the greedy one. Only actions whose
    /// bit is set in `mask` are eligible.
    int select_action(std::span<const double> state, std::uint8_t mask = 0x1F);
    /// argmax over the eligible actions of Q(state, a); ties go to the lowest index.
    int greedy_action(std::span<const double> state, std::uint8_t mask = 0x1F) const;

    void remember(Experience e);
    /// One replay update. Returns the batch loss, or nothing while the buffer holds fewer
    /// than batch_size transitions.
    std::optional<double> learn();
    void decay_epsilon() { cfg_.exploration.step(); }

    double epsilon() const { return cfg_.exploration.epsilon; }
    void set_epsilon(double eps) { cfg_.exploration.epsilon = eps; }
    const AgentConfig& config() const { return cfg_; }
    const QNetwork& network() const { return online_; }
    QNetwork& network() { return online_; }
    const QNetwork& target_network() const { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t learn_calls() const { return learn_calls_; }
    std::uint64_t episodes() const { return episodes_; }
    void count_episode() { ++episodes_; }

    /// Network weights plus epsilon, seed and counters. The replay buffer is not saved.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    /// Restores a checkpoint into an agent built from `cfg`; layer sizes must match.
    static DqnAgent load(std::istream& in, AgentConfig cfg);
    static DqnAgent load(const std::filesystem::path& path, AgentConfig cfg);

private:
    AgentConfig cfg_;
    std::uint64_t seed_;
    QNetwork online_;
    QNetwork target_;
    ReplayBuffer buffer_;
    std::mt19937_64 rng_;
    std::uint64_t learn_calls_ = 0;
    std::uint64_t episodes_ = 0;
};

}  // namespace ephemix

#endif  // EPHEMIX_AGENT_HPP
