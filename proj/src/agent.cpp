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

#include "ephemix/agent.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "ephemix/errors.hpp"

namespace ephemix {

namespace {

constexpr const char* kAgentMagic = "ephemix-agent";
constexpr int kAgentVersion = 1;

std::uint64_t mix_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL; }

std::string hexfloat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : slots_(capacity) {
    if (capacity == 0) {
        throw ValidationError("replay capacity must be positive");
    }
}

void ReplayBuffer::push(Experience e) {
    slots_[head_] = std::move(e);
    head_ = (head_ + 1) % slots_.size();
    size_ = std::min(size_ + 1, slots_.size());
}

const Experience& ReplayBuffer::operator[](std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("replay index out of range");
    }
    const std::size_t oldest = size_ < slots_.size() ? 0 : head_;
    return slots_[(oldest + i) % slots_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, std::mt19937_64& rng) const {
    if (count > size_) {
        throw std::invalid_argument("cannot sample more transitions than stored");
    }
    std::vector<std::size_t> picked;
    picked.reserve(count);
    std::unordered_set<std::size_t> seen;
    seen.reserve(count * 2);
    for (std::size_t j = size_ - count; j < size_; ++j) {
        std::uniform_int_distribution<std::size_t> dist(0, j);
        const std::size_t candidate = dist(rng);
        const std::size_t chosen = seen.contains(candidate) ? j : candidate;
        seen.insert(chosen);
        picked.push_back(chosen);
    }
    return picked;
}

void validate(const AgentConfig& cfg) {
    validate(cfg.training);
    if (cfg.widths.size() < 2) {
        throw ValidationError("agent network needs at least two layers");
    }
    if (cfg.replay_capacity == 0) {
        throw ValidationError("replay capacity must be positive");
    }
    const auto& x = cfg.exploration;
    if (!(x.epsilon >= 0.0 && x.epsilon <= 1.0) || !(x.epsilon_min >= 0.0 && x.epsilon_min <= 1.0) ||
        !(x.decay > 0.0 && x.decay <= 1.0)) {
        throw ValidationError("exploration parameters out of range");
    }
    if (cfg.target_sync == 0) {
        throw ValidationError("target_sync must be at least 1");
    }
    if (!(cfg.micro_gamma >= 0.0 && cfg.micro_gamma <= 1.0)) {
        throw ValidationError("micro_gamma must lie in [0,1]");
    }
    if (!(cfg.micro_action_cost >= 0.0)) {
        throw ValidationError("micro_action_cost must be non-negative");
    }
    if (!(cfg.reward_scale > 0.0)) {
        throw ValidationError("reward_scale must be positive");
    }
}

DqnAgent::DqnAgent(AgentConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      online_(cfg_.widths, seed),
      target_(online_),
      buffer_(cfg_.replay_capacity),
      rng_(mix_seed(seed)) {
    validate(cfg_);
}

namespace {

int masked_argmax(std::span<const double> q, std::uint8_t mask) {
    int best = -1;
    for (std::size_t a = 0; a < q.size(); ++a) {
        if ((mask >> a & 1u) && (best < 0 || q[a] > q[static_cast<std::size_t>(best)])) {
            best = static_cast<int>(a);
        }
    }
    return best;
}

std::uint8_t effective_mask(std::uint8_t mask, std::size_t actions) {
    const auto all = static_cast<std::uint8_t>((1u << actions) - 1u);
    const auto m = static_cast<std::uint8_t>(mask & all);
    return m == 0 ? all : m;
}

}  // namespace

int DqnAgent::greedy_action(std::span<const double> state, std::uint8_t mask) const {
    thread_local std::vector<double> q;
    q.resize(online_.output_size());
    online_.predict(state, q);
    return masked_argmax(q, effective_mask(mask, q.size()));
}

int DqnAgent::select_action(std::span<const double> state, std::uint8_t mask) {
    const std::uint8_t m = effective_mask(mask, online_.output_size());
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < cfg_.exploration.epsilon) {
        const int eligible = std::popcount(m);
        std::uniform_int_distribution<int> pick(0, eligible - 1);
        int k = pick(rng_);
        for (int a = 0;; ++a) {
            if ((m >> a & 1u) && k-- == 0) {
                return a;
            }
        }
    }
    return greedy_action(state, m);
}

void DqnAgent::remember(Experience e) {
    if (!e.closes_step) {
        e.reward -= cfg_.micro_action_cost;
    }
    e.reward *= cfg_.reward_scale;
    buffer_.push(std::move(e));
}

std::optional<double> DqnAgent::learn() {
    const std::size_t n = cfg_.training.batch_size;
    if (buffer_.size() < n) {
        return std::nullopt;
    }
    const std::size_t in = online_.input_size();
    const std::size_t out = online_.output_size();

    thread_local std::vector<double> inputs;
    thread_local std::vector<double> targets;
    thread_local std::vector<int> actions;
    thread_local std::vector<double> q_next;
    inputs.resize(n * in);
    targets.assign(n * out, 0.0);
    actions.resize(n);
    q_next.resize(out);

    const auto picks = buffer_.sample_indices(n, rng_);
    for (std::size_t s = 0; s < n; ++s) {
        const Experience& e = buffer_[picks[s]];
        std::copy(e.state.begin(), e.state.end(), inputs.begin() + static_cast<std::ptrdiff_t>(s * in));
        double y = e.reward;
        if (!e.terminal) {
            target_.predict(e.next_state, q_next);
            const double g = e.closes_step ? cfg_.training.gamma : cfg_.micro_gamma;
            y += g * q_next[static_cast<std::size_t>(masked_argmax(q_next, effective_mask(e.next_mask, out)))];
        }
        actions[s] = e.action;
        targets[s * out + static_cast<std::size_t>(e.action)] = y;
    }
    const double loss = online_.train_batch(inputs, targets, actions, cfg_.training);
    ++learn_calls_;
    if (learn_calls_ % cfg_.target_sync == 0) {
        target_ = online_;
    }
    return loss;
}

void DqnAgent::save(std::ostream& out) const {
    out << kAgentMagic << ' ' << kAgentVersion << '\n';
    out << "seed " << seed_ << '\n';
    out << "epsilon " << hexfloat(cfg_.exploration.epsilon) << '\n';
    out << "learn_calls " << learn_calls_ << '\n';
    out << "episodes " << episodes_ << '\n';
    online_.save(out);
}

void DqnAgent::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    save(out);
}

DqnAgent DqnAgent::load(std::istream& in, AgentConfig cfg) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kAgentMagic) {
        throw ParseError("not an agent checkpoint");
    }
    if (version != kAgentVersion) {
        throw ParseError("unsupported agent checkpoint version " + std::to_string(version));
    }
    std::string key;
    std::uint64_t seed = 0;
    std::string eps_text;
    std::uint64_t learn_calls = 0;
    std::uint64_t episodes = 0;
    in >> key >> seed;
    if (key != "seed") throw ParseError("agent checkpoint: expected seed");
    in >> key >> eps_text;
    if (key != "epsilon") throw ParseError("agent checkpoint: expected epsilon");
    in >> key >> learn_calls;
    if (key != "learn_calls") throw ParseError("agent checkpoint: expected learn_calls");
    in >> key >> episodes;
    if (key != "episodes") throw ParseError("agent checkpoint: expected episodes");

    QNetwork net = QNetwork::load(in);
    if (net.widths() != cfg.widths) {
        throw ConfigError("checkpoint layer sizes do not match the configured network");
    }
    DqnAgent agent(std::move(cfg), seed);
    agent.online_ = net;
    agent.target_ = net;
    agent.cfg_.exploration.epsilon = std::strtod(eps_text.c_str(), nullptr);
    agent.learn_calls_ = learn_calls;
    agent.episodes_ = episodes;
    return agent;
}

DqnAgent DqnAgent::load(const std::filesystem::path& path, AgentConfig cfg) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open checkpoint " + path.string());
    }
    return load(in, std::move(cfg));
}

}  // namespace ephemix
