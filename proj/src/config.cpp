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


#include "ephemix/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "ephemix/errors.hpp"
#include "json.hpp"

namespace ephemix {

using nlohmann::json;

namespace {

void allow_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) {
        throw ConfigError(std::string(where) + ": expected an object");
    }
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto name : keys) {
            known = known || k == name;
        }
        if (!known) {
            throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& into, std::string_view where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

RequestPolicy::Kind parse_request_kind(const std::string& s) {
    if (s == "all_available") return RequestPolicy::Kind::AllAvailable;
    if (s == "fixed") return RequestPolicy::Kind::Fixed;
    if (s == "poisson") return RequestPolicy::Kind::Poisson;
    throw ConfigError("environment.request.kind: unknown value '" + s + "'");
}

std::string request_kind_name(RequestPolicy::Kind k) {
    switch (k) {
        case RequestPolicy::Kind::AllAvailable: return "all_available";
        case RequestPolicy::Kind::Fixed: return "fixed";
        case RequestPolicy::Kind::Poisson: return "poisson";
    }
    return "?";
}

void read_host(const json& j, HostSpec& host, std::string_view where) {
    allow_keys(j, where, {"cpu_cores", "mem_gb"});
    read(j, "cpu_cores", host.cpu_cores, where);
    read(j, "mem_gb", host.mem_gb, where);
}

void read_traces(const json& j, TraceSource& t, const std::filesystem::path& base_dir) {
    allow_keys(j, "traces", {"source", "path", "host", "window_len", "profile", "seed", "days", "forecaster"});
    std::string source = t.kind == TraceSource::Kind::File ? "file" : "synthetic";
    read(j, "source", source, "traces");
    if (source == "file") {
        t.kind = TraceSource::Kind::File;
    } else if (source == "synthetic") {
        t.kind = TraceSource::Kind::Synthetic;
    } else {
        throw ConfigError("traces.source: expected 'file' or 'synthetic', got '" + source + "'");
    }
    std::string path;
    read(j, "path", path, "traces");
    if (!path.empty()) {
        t.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
    }
    if (j.contains("host")) {
        read_host(j["host"], t.host, "traces.host");
    }
    read(j, "window_len", t.window_len, "traces");
    read(j, "seed", t.seed, "traces");
    read(j, "days", t.days, "traces");
    read(j, "forecaster", t.forecaster, "traces");
    if (j.contains("profile")) {
        const auto& p = j["profile"];
        allow_keys(p, "traces.profile",
                   {"base_cpu", "base_mem", "diurnal_amplitude", "noise_scale", "shock_scale", "p_true"});
        read(p, "base_cpu", t.profile.base_cpu, "traces.profile");
        read(p, "base_mem", t.profile.base_mem, "traces.profile");
        read(p, "diurnal_amplitude", t.profile.diurnal_amplitude, "traces.profile");
        read(p, "noise_scale", t.profile.noise_scale, "traces.profile");
        read(p, "shock_scale", t.profile.shock_scale, "traces.profile");
        read(p, "p_true", t.profile.p_true, "traces.profile");
    }
    t.profile.host = t.host;
    t.profile.window_len = t.window_len;
}

void read_cost(const json& j, CostModel& c) {
    allow_keys(j, "cost_model", {"cpe", "cps", "cpv", "step_minutes"});
    read(j, "cpe", c.cpe, "cost_model");
    read(j, "cps", c.cps, "cost_model");
    read(j, "cpv", c.cpv, "cost_model");
    read(j, "step_minutes", c.step_minutes, "cost_model");
}

void read_penalties(const json& j, PenaltySchedule& s) {
    if (!j.is_array()) {
        throw ConfigError("penalty_schedule: expected an array of tiers");
    }
    s.tiers.clear();
    for (const auto& tier : j) {
        allow_keys(tier, "penalty_schedule[]", {"above_minutes", "up_to_minutes", "discount"});
        PenaltyTier t;
        read(tier, "above_minutes", t.lower_exclusive, "penalty_schedule[]");
        if (tier.contains("up_to_minutes") && !tier["up_to_minutes"].is_null()) {
            read(tier, "up_to_minutes", t.upper_inclusive, "penalty_schedule[]");
        }
        read(tier, "discount", t.discount, "penalty_schedule[]");
        s.tiers.push_back(t);
    }
}

void read_environment(const json& j, ExperimentConfig& cfg) {
    allow_keys(j, "environment", {"stable_capacity", "request", "k_max", "recovery_phase", "mask_invalid_actions", "monotone_phases", "unit"});
    if (j.contains("stable_capacity")) {
        const auto& s = j["stable_capacity"];
        allow_keys(s, "environment.stable_capacity", {"fraction", "units"});
        read(s, "fraction", cfg.stable.fraction, "environment.stable_capacity");
        if (s.contains("units")) {
            std::int64_t units = 0;
            read(s, "units", units, "environment.stable_capacity");
            cfg.stable.units = units;
        }
    }
    if (j.contains("request")) {
        const auto& r = j["request"];
        allow_keys(r, "environment.request", {"kind", "units", "mean"});
        std::string kind = request_kind_name(cfg.env.request.kind);
        read(r, "kind", kind, "environment.request");
        cfg.env.request.kind = parse_request_kind(kind);
        read(r, "units", cfg.env.request.units, "environment.request");
        read(r, "mean", cfg.env.request.mean, "environment.request");
    }
    read(j, "k_max", cfg.env.k_max, "environment");
    read(j, "recovery_phase", cfg.env.recovery_phase, "environment");
    read(j, "mask_invalid_actions", cfg.env.mask_invalid_actions, "environment");
    read(j, "monotone_phases", cfg.env.monotone_phases, "environment");
    if (j.contains("unit")) {
        allow_keys(j["unit"], "environment.unit", {"vcpu", "mem_gb"});
        read(j["unit"], "vcpu", cfg.env.unit.vcpu, "environment.unit");
        read(j["unit"], "mem_gb", cfg.env.unit.mem_gb, "environment.unit");
    }
}

void read_agent(const json& j, AgentConfig& a) {
    allow_keys(j, "agent",
               {"widths", "learning_rate", "batch_size", "gamma", "optimizer", "replay_capacity", "epsilon",
                "epsilon_decay", "epsilon_min", "target_sync", "micro_gamma", "micro_action_cost", "reward_scale", "potential_shaping"});
    read(j, "widths", a.widths, "agent");
    read(j, "learning_rate", a.training.learning_rate, "agent");
    read(j, "batch_size", a.training.batch_size, "agent");
    read(j, "gamma", a.training.gamma, "agent");
    if (j.contains("optimizer")) {
        std::string name;
        read(j, "optimizer", name, "agent");
        try {
            a.training.optimizer = parse_optimizer(name);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("agent.optimizer: ") + e.what());
        }
    }
    read(j, "replay_capacity", a.replay_capacity, "agent");
    read(j, "epsilon", a.exploration.epsilon, "agent");
    read(j, "epsilon_decay", a.exploration.decay, "agent");
    read(j, "epsilon_min", a.exploration.epsilon_min, "agent");
    read(j, "target_sync", a.target_sync, "agent");
    read(j, "micro_gamma", a.micro_gamma, "agent");
    read(j, "micro_action_cost", a.micro_action_cost, "agent");
    read(j, "reward_scale", a.reward_scale, "agent");
    read(j, "potential_shaping", a.potential_shaping, "agent");
}

void read_baselines(const json& j, MarginPolicy& m) {
    allow_keys(j, "baselines", {"fixed_fraction", "scavenger_k", "history_window"});
    read(j, "fixed_fraction", m.fixed_fraction, "baselines");
    read(j, "scavenger_k", m.scavenger_k, "baselines");
    read(j, "history_window", m.history_window, "baselines");
}

template <typename F>
void wrap(const char* where, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

}  // namespace

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Agent: return "agent";
        case PolicyKind::Fixed: return "fixed";
        case PolicyKind::Scavenger: return "scavenger";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "agent") return PolicyKind::Agent;
    if (name == "fixed") return PolicyKind::Fixed;
    if (name == "scavenger") return PolicyKind::Scavenger;
    throw ConfigError("policy: expected agent, fixed or scavenger, got '" + name + "'");
}

void validate(const ExperimentConfig& cfg) {
    const auto& t = cfg.traces;
    wrap("traces.host", [&] { validate(t.host); });
    if (t.window_len == 0) {
        throw ConfigError("traces.window_len must be positive");
    }
    if (t.kind == TraceSource::Kind::File) {
        if (t.path.empty()) {
            throw ConfigError("traces.path is required for file traces");
        }
        if (!std::filesystem::is_regular_file(t.path)) {
            throw ConfigError("traces.path does not exist: " + t.path.string());
        }
    } else {
        if (t.days < 1) {
            throw ConfigError("traces.days must be at least 1");
        }
        wrap("traces.profile", [&] { validate(t.profile); });
    }
    if (t.forecaster != "trace") {
        wrap("traces.forecaster", [&] { (void)make_forecaster(t.forecaster); });
    }
    if (cfg.seeds.empty()) {
        throw ConfigError("seeds must list at least one seed");
    }
    if (cfg.episodes == 0) {
        throw ConfigError("episodes must be positive");
    }
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0,1)");
    }
    wrap("penalty_schedule", [&] { validate(cfg.penalties); });
    wrap("environment", [&] { validate(cfg.env); });
    if (cfg.stable.units && *cfg.stable.units < 0) {
        throw ConfigError("environment.stable_capacity.units must be non-negative");
    }
    if (!(cfg.stable.fraction >= 0.0)) {
        throw ConfigError("environment.stable_capacity.fraction must be non-negative");
    }
    wrap("agent", [&] { validate(cfg.agent); });
    if (cfg.agent.widths.front() != kStateSize || cfg.agent.widths.back() != static_cast<std::size_t>(kActionCount)) {
        throw ConfigError("agent.widths must start with 6 inputs and end with 5 outputs");
    }
    wrap("baselines", [&] { validate(cfg.baseline); });
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(j, "config",
               {"traces", "episodes", "seeds", "train_fraction", "cost_model", "penalty_schedule", "environment",
                "agent", "baselines", "policy"});
    ExperimentConfig cfg;
    if (j.contains("traces")) read_traces(j["traces"], cfg.traces, base_dir);
    cfg.traces.profile.host = cfg.traces.host;
    cfg.traces.profile.window_len = cfg.traces.window_len;
    read(j, "episodes", cfg.episodes, "config");
    read(j, "seeds", cfg.seeds, "config");
    read(j, "train_fraction", cfg.train_fraction, "config");
    if (j.contains("cost_model")) read_cost(j["cost_model"], cfg.env.cost);
    if (j.contains("penalty_schedule")) read_penalties(j["penalty_schedule"], cfg.penalties);
    if (j.contains("environment")) read_environment(j["environment"], cfg);
    if (j.contains("agent")) read_agent(j["agent"], cfg.agent);
    if (j.contains("baselines")) read_baselines(j["baselines"], cfg.baseline);
    if (j.contains("policy")) {
        std::string name;
        read(j, "policy", name, "config");
        cfg.policy = parse_policy(name);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

std::string dump_config(const ExperimentConfig& cfg) {
    const auto& t = cfg.traces;
    json j;
    j["traces"] = {
        {"source", t.kind == TraceSource::Kind::File ? "file" : "synthetic"},
        {"host", {{"cpu_cores", t.host.cpu_cores}, {"mem_gb", t.host.mem_gb}}},
        {"window_len", t.window_len},
        {"forecaster", t.forecaster},
    };
    if (t.kind == TraceSource::Kind::File) {
        j["traces"]["path"] = t.path.string();
    } else {
        j["traces"]["seed"] = t.seed;
        j["traces"]["days"] = t.days;
        j["traces"]["profile"] = {{"base_cpu", t.profile.base_cpu},
                                  {"base_mem", t.profile.base_mem},
                                  {"diurnal_amplitude", t.profile.diurnal_amplitude},
                                  {"noise_scale", t.profile.noise_scale},
                                  {"shock_scale", t.profile.shock_scale},
                                  {"p_true", t.profile.p_true}};
    }
    j["episodes"] = cfg.episodes;
    j["seeds"] = cfg.seeds;
    j["train_fraction"] = cfg.train_fraction;
    j["cost_model"] = {{"cpe", cfg.env.cost.cpe},
                       {"cps", cfg.env.cost.cps},
                       {"cpv", cfg.env.cost.cpv},
                       {"step_minutes", cfg.env.cost.step_minutes}};
    j["penalty_schedule"] = json::array();
    for (const auto& tier : cfg.penalties.tiers) {
        json jt = {{"above_minutes", tier.lower_exclusive}, {"discount", tier.discount}};
        jt["up_to_minutes"] = std::isinf(tier.upper_inclusive) ? json(nullptr) : json(tier.upper_inclusive);
        j["penalty_schedule"].push_back(jt);
    }
    json stable = {{"fraction", cfg.stable.fraction}};
    if (cfg.stable.units) {
        stable["units"] = *cfg.stable.units;
    }
    j["environment"] = {
        {"stable_capacity", stable},
        {"request",
         {{"kind", request_kind_name(cfg.env.request.kind)},
          {"units", cfg.env.request.units},
          {"mean", cfg.env.request.mean}}},
        {"k_max", cfg.env.k_max},
        {"recovery_phase", cfg.env.recovery_phase},
        {"mask_invalid_actions", cfg.env.mask_invalid_actions},
        {"monotone_phases", cfg.env.monotone_phases},
        {"unit", {{"vcpu", cfg.env.unit.vcpu}, {"mem_gb", cfg.env.unit.mem_gb}}},
    };
    const auto& a = cfg.agent;
    j["agent"] = {{"widths", a.widths},
                  {"learning_rate", a.training.learning_rate},
                  {"batch_size", a.training.batch_size},
                  {"gamma", a.training.gamma},
                  {"optimizer", to_string(a.training.optimizer)},
                  {"replay_capacity", a.replay_capacity},
                  {"epsilon", a.exploration.epsilon},
                  {"epsilon_decay", a.exploration.decay},
                  {"epsilon_min", a.exploration.epsilon_min},
                  {"target_sync", a.target_sync},
                  {"micro_gamma", a.micro_gamma},
                  {"micro_action_cost", a.micro_action_cost},
                  {"reward_scale", a.reward_scale},
                  {"potential_shaping", a.potential_shaping}};
    j["baselines"] = {{"fixed_fraction", cfg.baseline.fixed_fraction},
                      {"scavenger_k", cfg.baseline.scavenger_k},
                      {"history_window", cfg.baseline.history_window}};
    j["policy"] = to_string(cfg.policy);
    return j.dump(2) + "\n";
}

}  // namespace ephemix
