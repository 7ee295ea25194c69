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


#include "ephemix/harness.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "ephemix/errors.hpp"
#include "ephemix/text.hpp"
#include "ephemix/volatility.hpp"

namespace ephemix {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void append_codes(std::string& into, const std::vector<Action>& actions) {
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i > 0) {
            into += ' ';
        }
        into += short_code(actions[i]);
    }
}

std::vector<double> as_vector(const std::array<double, kStateSize>& a) { return {a.begin(), a.end()}; }

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::size_t train_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

ExperimentData prepare_data(const ExperimentConfig& cfg) {
    ExperimentData data;
    const auto& t = cfg.traces;
    if (t.kind == TraceSource::Kind::File) {
        data.windows = load_traces(t.path, t.host, t.window_len);
    } else {
        data.windows = generate_synthetic(t.seed, t.days, t.profile);
    }
    if (t.forecaster != "trace" && !data.windows.empty()) {
        data.windows = reforecast(data.windows, *make_forecaster(t.forecaster));
    }
    if (data.windows.empty()) {
        throw ConfigError("trace set is empty (fewer samples than one window)");
    }
    data.n_train = train_count(data.windows.size(), cfg.train_fraction);
    if (data.n_train == 0 || data.n_train == data.windows.size()) {
        throw ConfigError("train/test split of " + std::to_string(data.windows.size()) +
                          " windows leaves one side empty");
    }
    return data;
}

double volatility_prior(std::span<const TraceWindow> windows, std::size_t i) {
    if (i == 0) {
        return 1.0;
    }
    return estimate_volatility(windows[i - 1]).p_hat;
}

std::int64_t stable_capacity(const StableCapacityRule& rule, const TraceWindow& window, const ResourceUnit& unit) {
    if (rule.units) {
        return *rule.units;
    }
    return stable_capacity_for(window, rule.fraction, unit);
}

std::uint64_t request_seed(std::uint64_t base, std::size_t i) { return splitmix(base ^ splitmix(i)); }

EpisodeResult run_agent_episode(DqnAgent& agent, const EnvConfig& env_cfg, const PenaltySchedule& schedule,
                                const TraceWindow& window, std::int64_t stable_cap, double p, bool learn,
                                std::uint64_t req_seed, std::vector<StepRecord>* log, double* mean_loss) {
    Environment env(env_cfg);
    env.reset(window, stable_cap, p, req_seed);

    // The transition opened by the last decision, closed by the next observation.
    std::array<double, kStateSize> pending_state{};
    int pending_action = -1;
    double pending_phi = 0.0;
    const auto& acfg = agent.config();
    const auto phi = [&](const EnvState& s) {
        return acfg.potential_shaping
                   ? step_reward(s.alloc_e, s.alloc_s, s.rem, env_cfg.cost) / (1.0 - acfg.training.gamma)
                   : 0.0;
    };
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    const auto close = [&](const std::array<double, kStateSize>& next, ActionMask next_mask, double reward,
                           bool terminal, bool closes_step) {
        if (!learn || pending_action < 0) {
            return;
        }
        const double g = closes_step ? acfg.training.gamma : acfg.micro_gamma;
        reward += (terminal ? 0.0 : g * phi(env.state())) - pending_phi;
        agent.remember(
            Experience{as_vector(pending_state), pending_action, reward, as_vector(next), terminal, closes_step, next_mask});
        pending_action = -1;
        if (const auto loss = agent.learn()) {
            loss_sum += *loss;
            ++loss_count;
        }
    };

    PhaseDirections dirs;
    const auto current_mask = [&] {
        ActionMask m = env_cfg.mask_invalid_actions ? env.valid_actions() : kAllActionsMask;
        return env_cfg.monotone_phases ? dirs.filter(m) : m;
    };

    const DecisionSource source = [&](const EnvState&) {
        const auto obs = env.observe();
        const ActionMask mask = current_mask();
        close(obs, mask, 0.0, false, false);
        const int a = agent.select_action(obs, mask);
        pending_state = obs;
        pending_action = a;
        pending_phi = phi(env.state());
        dirs.record(static_cast<Action>(a));
        return static_cast<Action>(a);
    };

    EpisodeAccumulator acc(env_cfg.cost);
    if (log) {
        log->clear();
        log->reserve(window.size());
    }
    while (!env.done()) {
        StepRecord r;
        r.t = env.step();
        dirs.reset();
        append_codes(r.actions, env.decide(source));
        if (env_cfg.recovery_phase) {
            env.reclaim_now();
            dirs.reset();
            r.actions += ';';
            append_codes(r.actions, env.decide(source));
        }
        const StepOutcome out = env.settle();
        r.rem = out.next_state.rem;
        r.alloc_e = out.next_state.alloc_e;
        r.alloc_s = out.next_state.alloc_s;
        r.request = out.next_state.request;
        r.lost_units = out.lost_units;
        r.reward = out.reward;
        r.violated = out.violated;
        dirs.reset();
        if (out.terminal) {
            close(encode_state(out.next_state, env.ephemeral_capacity(), env.stable_capacity()), kAllActionsMask,
                  out.reward, true, true);
        } else {
            close(env.observe(), current_mask(), out.reward, false, true);
        }
        acc.add(r);
        if (log) {
            log->push_back(std::move(r));
        }
    }
    if (mean_loss) {
        *mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    }
    return acc.finish(schedule, 0, p);
}

TrainingRun train_agent(const ExperimentConfig& cfg, const ExperimentData& data, std::uint64_t seed,
                        std::ostream* progress) {
    TrainingRun run{seed, DqnAgent(cfg.agent, seed), {}};
    run.curve.reserve(cfg.episodes);
    const auto train = data.train();
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        const std::size_t w = ep % train.size();
        const TraceWindow& window = train[w];
        CurvePoint point;
        point.episode = ep;
        point.window = w;
        point.epsilon = run.agent.epsilon();
        point.result = run_agent_episode(run.agent, cfg.env, cfg.penalties, window,
                                         stable_capacity(cfg.stable, window, cfg.env.unit),
                                         volatility_prior(data.windows, w), true,
                                         request_seed(seed, ep), nullptr, &point.mean_loss);
        point.result.episode = ep;
        run.agent.decay_epsilon();
        run.agent.count_episode();
        if (progress && (ep + 1) % 10 == 0) {
            *progress << "seed " << seed << " episode " << ep + 1 << "/" << cfg.episodes << " profit "
                      << format_double(point.result.profit) << " violation_min "
                      << format_double(point.result.ledger.violation_minutes) << " epsilon "
                      << format_double(run.agent.epsilon()) << '\n';
        }
        run.curve.push_back(point);
    }
    return run;
}

void write_learning_curve(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "episode,window,epsilon,total_reward,profit,violation_min,ephem_unit_hours,stable_pct,lost_units,"
           "mean_loss\n";
    for (const auto& c : curve) {
        const auto& r = c.result;
        out << c.episode << ',' << c.window << ',' << format_double(c.epsilon) << ','
            << format_double(r.total_reward) << ',' << format_double(r.profit) << ','
            << format_double(r.ledger.violation_minutes) << ',' << format_double(r.ledger.ephemeral_unit_hours)
            << ',' << format_double(r.stable_pct) << ',' << r.lost_units << ',' << format_double(c.mean_loss)
            << '\n';
    }
}

std::vector<std::filesystem::path> run_training(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                                std::ostream* progress) {
    validate(cfg);
    const ExperimentData data = prepare_data(cfg);
    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "config.json");
        out << dump_config(cfg);
    }
    std::vector<std::filesystem::path> checkpoints;
    for (const auto seed : cfg.seeds) {
        TrainingRun run = train_agent(cfg, data, seed, progress);
        const auto ckpt = out_dir / ("checkpoint_seed" + std::to_string(seed) + ".txt");
        run.agent.save(ckpt);
        auto curve = open_out(out_dir / ("learning_curve_seed" + std::to_string(seed) + ".csv"));
        write_learning_curve(curve, run.curve);
        checkpoints.push_back(ckpt);
    }
    return checkpoints;
}

PolicyEvaluation evaluate_policy(const ExperimentConfig& cfg, const ExperimentData& data, PolicyKind policy,
                                 DqnAgent* agent, bool keep_logs) {
    PolicyEvaluation eval;
    eval.policy = policy;
    if (policy == PolicyKind::Agent) {
        if (!agent) {
            throw std::invalid_argument("agent evaluation needs an agent");
        }
        agent->set_epsilon(agent->config().exploration.epsilon_min);
    }
    MarginPolicy margin = cfg.baseline;
    margin.kind = policy == PolicyKind::Scavenger ? MarginPolicy::Kind::Scavenger : MarginPolicy::Kind::Fixed;

    for (std::size_t i = data.n_train; i < data.windows.size(); ++i) {
        const TraceWindow& window = data.windows[i];
        const std::uint64_t req = request_seed(cfg.traces.seed, i);
        const double p = volatility_prior(data.windows, i);
        std::vector<StepRecord> log;
        EpisodeResult r;
        if (policy == PolicyKind::Agent) {
            r = run_agent_episode(*agent, cfg.env, cfg.penalties, window,
                                  stable_capacity(cfg.stable, window, cfg.env.unit), p, false, req,
                                  keep_logs ? &log : nullptr);
        } else {
            const std::span<const TraceSample> history =
                i > 0 ? std::span<const TraceSample>(data.windows[i - 1].samples) : std::span<const TraceSample>();
            r = run_baseline_episode(margin, window, history, cfg.env, cfg.penalties, req, keep_logs ? &log : nullptr);
            r.p = p;
        }
        r.episode = i - data.n_train;
        eval.days.push_back(r);
        if (keep_logs) {
            eval.logs.push_back(std::move(log));
        }
    }
    eval.summary = summarize(eval.days);
    return eval;
}

namespace {

DqnAgent load_agent(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint) {
    if (checkpoint.empty()) {
        throw ConfigError("the agent policy needs --checkpoint");
    }
    return DqnAgent::load(checkpoint, cfg.agent);
}

void write_events(const std::filesystem::path& path, const PolicyEvaluation& eval) {
    auto out = open_out(path);
    write_event_header(out);
    for (std::size_t d = 0; d < eval.logs.size(); ++d) {
        for (const auto& r : eval.logs[d]) {
            write_event_row(out, d, r);
        }
    }
}

}  // namespace

PolicyEvaluation run_evaluation(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                                const std::filesystem::path& out_dir) {
    validate(cfg);
    std::optional<DqnAgent> agent;
    if (cfg.policy == PolicyKind::Agent) {
        agent.emplace(load_agent(cfg, checkpoint));
    }
    const ExperimentData data = prepare_data(cfg);
    PolicyEvaluation eval = evaluate_policy(cfg, data, cfg.policy, agent ? &*agent : nullptr, true);

    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "eval_days.csv");
        write_day_header(out);
        for (const auto& r : eval.days) {
            write_day_row(out, r);
        }
    }
    write_events(out_dir / "eval_events.csv", eval);
    auto out = open_out(out_dir / "eval_summary.txt");
    write_summary(out, to_string(cfg.policy), eval.summary);
    return eval;
}

void write_comparison(std::ostream& out, std::span<const PolicyEvaluation> arms) {
    out << "policy,profit,violation_min,ephem_unit_hours,stable_pct\n";
    for (const auto& arm : arms) {
        const auto& s = arm.summary;
        out << to_string(arm.policy) << ',' << format_double(s.profit.mean) << ','
            << format_double(s.violation_minutes.mean) << ',' << format_double(s.ephemeral_unit_hours.mean) << ','
            << format_double(s.stable_pct.mean) << '\n';
    }
}

std::vector<PolicyEvaluation> run_comparison(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                                             const std::filesystem::path& out_dir) {
    validate(cfg);
    DqnAgent agent = load_agent(cfg, checkpoint);
    const ExperimentData data = prepare_data(cfg);
    std::vector<PolicyEvaluation> arms;
    arms.push_back(evaluate_policy(cfg, data, PolicyKind::Agent, &agent, true));
    arms.push_back(evaluate_policy(cfg, data, PolicyKind::Fixed, nullptr, true));
    arms.push_back(evaluate_policy(cfg, data, PolicyKind::Scavenger, nullptr, true));

    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "comparison.csv");
        write_comparison(out, arms);
    }
    {
        auto out = open_out(out_dir / "comparison_days.csv");
        out << "policy,";
        write_day_header(out);
        for (const auto& arm : arms) {
            for (const auto& r : arm.days) {
                out << to_string(arm.policy) << ',';
                write_day_row(out, r);
            }
        }
    }
    auto summary = open_out(out_dir / "comparison_summary.txt");
    for (const auto& arm : arms) {
        write_events(out_dir / ("events_" + to_string(arm.policy) + ".csv"), arm);
        write_summary(summary, to_string(arm.policy), arm.summary);
    }
    return arms;
}

}  // namespace ephemix
