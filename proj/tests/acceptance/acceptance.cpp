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

// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit status is
// non-zero when a criterion fails that was not named with --tolerate.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ephemix/agent.hpp"
#include "ephemix/baselines.hpp"
#include "ephemix/config.hpp"
#include "ephemix/economics.hpp"
#include "ephemix/environment.hpp"
#include "ephemix/harness.hpp"
#include "ephemix/qnetwork.hpp"
#include "ephemix/text.hpp"
#include "ephemix/traces.hpp"
#include "ephemix/volatility.hpp"

namespace fs = std::filesystem;
using namespace ephemix;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// --- 1: estimator exactness -------------------------------------------------

Verdict volatility_exactness() {
    const auto t0 = Clock::now();
    const bool row0 = indicator_z({0, 0.60, 0.60, 0.30, 0.40}) == 1;
    const bool row1 = indicator_z({1, 0.30, 0.50, 0.40, 0.53}) == 0;

    std::size_t windows = 0;
    std::size_t mismatches = 0;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        GeneratorProfile profile;
        profile.p_true = u(rng);
        for (const auto& w : generate_synthetic(seed, 3, profile)) {
            std::size_t negative = 0;
            for (const auto& s : w.samples) {
                const bool cpu_neg = std::signbit(s.cpu_pred - s.cpu_used) && s.cpu_pred != s.cpu_used;
                const bool mem_neg = std::signbit(s.mem_pred - s.mem_used) && s.mem_pred != s.mem_used;
                negative += (cpu_neg || mem_neg) ? 1 : 0;
            }
            const double brute = static_cast<double>(negative) / static_cast<double>(w.size());
            mismatches += estimate_volatility(w).p_hat == brute ? 0 : 1;
            ++windows;
        }
    }
    // Arbitrary windows, not only generator output.
    for (int k = 0; k < 200; ++k) {
        TraceWindow w{{64, 256}, {}};
        const std::size_t n = 1 + rng() % 600;
        std::size_t negative = 0;
        for (std::size_t t = 0; t < n; ++t) {
            TraceSample s{static_cast<std::int64_t>(t), u(rng), u(rng), u(rng), u(rng)};
            if (rng() % 4 == 0) s.cpu_pred = s.cpu_used;
            negative += (s.cpu_pred < s.cpu_used || s.mem_pred < s.mem_used) ? 1 : 0;
            w.samples.push_back(s);
        }
        mismatches += estimate_volatility(w).p_hat == static_cast<double>(negative) / static_cast<double>(n) ? 0 : 1;
        ++windows;
    }
    const double elapsed = seconds_since(t0);
    return {row0 && row1 && mismatches == 0 && elapsed < 1.0,
            std::to_string(windows) + " windows, " + std::to_string(mismatches) + " mismatches, worked rows " +
                (row0 && row1 ? "ok" : "WRONG") + ", " + fmt(elapsed, 3) + " s"};
}

// --- 2: estimator consistency -----------------------------------------------

Verdict volatility_consistency() {
    const auto t0 = Clock::now();
    std::string detail;
    bool pass = true;
    for (const double p : {0.1, 0.5, 0.9}) {
        GeneratorProfile profile;
        profile.p_true = p;
        int within = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto w = generate_synthetic(1000 + seed, 1, profile);
            within += std::abs(estimate_volatility(w[0]).p_hat - p) <= 0.07 ? 1 : 0;
        }
        pass = pass && within >= 95;
        detail += "p=" + fmt(p, 1) + ": " + std::to_string(within) + "/100; ";
    }
    const double elapsed = seconds_since(t0);
    pass = pass && elapsed < 10.0;
    return {pass, detail + fmt(elapsed, 2) + " s"};
}

// --- 3: economics oracles ---------------------------------------------------

Verdict economics_oracles() {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<std::int64_t> units(0, 200);
    std::uniform_real_distribution<double> hours(0.0, 500.0);
    std::uniform_real_distribution<double> minutes(0.0, 1440.0);
    const CostModel m;
    const auto schedule = PenaltySchedule::standard();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto e = units(rng), s = units(rng), r = units(rng);
        const double oracle = (0.0317 * e - 0.0928 * s - 0.1856 * r) * (3.0 / 60.0);
        worst = std::max(worst, std::abs(step_reward(e, s, r, m) - oracle));

        const DailyLedger l{hours(rng), hours(rng) / 10.0, minutes(rng)};
        const double vm = l.violation_minutes;
        const double d = vm > 720.0 ? 0.30 : vm > 120.0 ? 0.15 : vm > 15.0 ? 0.10 : 0.0;
        const double profit_oracle = l.ephemeral_unit_hours * 0.0317 * (1.0 - d) - l.stable_unit_hours * 0.0928;
        worst = std::max(worst, std::abs(daily_profit(l, m, schedule) - profit_oracle));
    }
    struct Edge {
        double minutes;
        double discount;
    };
    const std::array<Edge, 7> edges{{{15.0, 0.0},
                                     {std::nextafter(15.0, 1e9), 0.10},
                                     {120.0, 0.10},
                                     {std::nextafter(120.0, 1e9), 0.15},
                                     {720.0, 0.15},
                                     {std::nextafter(720.0, 1e9), 0.30},
                                     {60.0, 0.10}}};
    bool tiers = true;
    for (const auto& edge : edges) {
        tiers = tiers && discount(edge.minutes, schedule) == edge.discount;
    }
    return {worst <= 1e-12 && tiers,
            "max abs error " + format_double(worst) + " over 2000 evaluations, tier boundaries " +
                (tiers ? "exact" : "WRONG")};
}

// --- 4: environment conservation --------------------------------------------

Verdict environment_conservation() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    std::size_t steps = 0;
    for (int seq = 0; seq < 10000; ++seq) {
        GeneratorProfile profile;
        profile.window_len = 4 + rng() % 13;
        profile.p_true = u(rng);
        profile.host = HostSpec{static_cast<int>(8 + rng() % 57), static_cast<int>(32 + rng() % 225)};
        const auto w = generate_synthetic(rng(), 1, profile)[0];
        EnvConfig cfg;
        cfg.k_max = 1 + static_cast<int>(rng() % 12);
        cfg.recovery_phase = rng() % 4 != 0;
        Environment env(cfg);
        const std::int64_t cap = static_cast<std::int64_t>(rng() % 9);
        env.reset(w, cap, u(rng));
        const auto source = [&](const EnvState&) { return static_cast<Action>(pick(rng)); };
        const auto sound = [&](const EnvState& s) {
            return s.alloc_s + s.avail_s == cap && s.rem >= 0 && s.alloc_e >= 0 && s.avail_e >= 0 &&
                   s.alloc_s >= 0 && s.avail_s >= 0;
        };
        while (!env.done()) {
            const std::size_t t = env.step();
            env.decide(source);
            violations += sound(env.state()) ? 0 : 1;
            if (cfg.recovery_phase) {
                env.reclaim_now();
                env.decide(source);
                violations += sound(env.state()) ? 0 : 1;
            }
            const auto out = env.settle();
            const auto& s = out.next_state;
            violations += sound(s) ? 0 : 1;
            violations += s.alloc_e + s.avail_e == units_from_actual(w, t, cfg.unit) ? 0 : 1;
            ++steps;
        }
    }
    return {violations == 0,
            "10000 sequences, " + std::to_string(steps) + " steps, " + std::to_string(violations) + " violations"};
}

// --- 5: gradient check ------------------------------------------------------

Verdict gradient_check_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    const int nets = 12;
    for (int k = 0; k < nets; ++k) {
        const auto net = QNetwork::standard(rng());
        std::vector<double> x(kStateSize);
        for (auto& v : x) v = u(rng);
        worst = std::max(worst, gradient_check(net, x, 1e-5));
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-4 && elapsed < 30.0, std::to_string(nets) + " networks, max relative error " +
                                                 format_double(worst) + ", " + fmt(elapsed, 2) + " s"};
}

// --- 6: DQN against value iteration -----------------------------------------

struct TinyMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<std::vector<std::size_t>> next;
    std::vector<std::vector<double>> reward;
};

TinyMdp random_mdp(std::mt19937_64& rng) {
    TinyMdp m;
    m.states = 1 + rng() % 3;
    m.actions = 2 + rng() % 4;
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    m.next.assign(m.states, std::vector<std::size_t>(m.actions));
    m.reward.assign(m.states, std::vector<double>(m.actions));
    for (std::size_t s = 0; s < m.states; ++s) {
        for (std::size_t a = 0; a < m.actions; ++a) {
            m.next[s][a] = rng() % m.states;
            m.reward[s][a] = r(rng);
        }
    }
    return m;
}

std::vector<std::vector<double>> value_iteration(const TinyMdp& m, double gamma) {
    std::vector<double> v(m.states, 0.0);
    std::vector<std::vector<double>> q(m.states, std::vector<double>(m.actions, 0.0));
    for (int it = 0; it < 5000; ++it) {
        for (std::size_t s = 0; s < m.states; ++s) {
            for (std::size_t a = 0; a < m.actions; ++a) {
                q[s][a] = m.reward[s][a] + gamma * v[m.next[s][a]];
            }
        }
        for (std::size_t s = 0; s < m.states; ++s) {
            v[s] = *std::max_element(q[s].begin(), q[s].end());
        }
    }
    return q;
}

std::vector<double> one_hot(std::size_t s) {
    std::vector<double> x(kStateSize, 0.0);
    x[s] = 1.0;
    return x;
}

Verdict dqn_value_iteration() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(606);
    int matched = 0;
    const int total = 20;
    std::string misses;
    for (int k = 0; k < total; ++k) {
        const TinyMdp m = random_mdp(rng);
        const auto q_star = value_iteration(m, 0.95);
        const auto mask = static_cast<std::uint8_t>((1u << m.actions) - 1u);

        AgentConfig cfg;
        cfg.training.optimizer = Optimizer::Adam;
        DqnAgent agent(cfg, 6000 + static_cast<std::uint64_t>(k));
        std::size_t s = 0;
        for (int step = 0; step < 12000; ++step) {
            const auto x = one_hot(s);
            const int a = agent.select_action(x, mask);
            const std::size_t s2 = m.next[s][static_cast<std::size_t>(a)];
            agent.remember(Experience{x, a, m.reward[s][static_cast<std::size_t>(a)], one_hot(s2), false, true, mask});
            agent.learn();
            s = step % 50 == 49 ? rng() % m.states : s2;
            if (step % 100 == 99) {
                agent.decay_epsilon();
            }
        }
        bool ok = true;
        for (std::size_t st = 0; st < m.states; ++st) {
            const auto a = static_cast<std::size_t>(agent.greedy_action(one_hot(st), mask));
            const double best = *std::max_element(q_star[st].begin(), q_star[st].end());
            ok = ok && q_star[st][a] >= best - 1e-9;
        }
        matched += ok ? 1 : 0;
        if (!ok) {
            misses += " #" + std::to_string(k);
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = matched * 100 >= 95 * total && elapsed < 300.0;
    return {pass, std::to_string(matched) + "/" + std::to_string(total) + " MDPs match the oracle policy" +
                      (misses.empty() ? "" : " (missed" + misses + ")") + ", " + fmt(elapsed, 1) + " s"};
}

// --- 7 and 8: directional comparison against the baselines ------------------

struct ArmStats {
    double profit = 0.0;
    double violation = 0.0;
    double stable = 0.0;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    double p_true = 0.0;
    ArmStats agent, fixed, scavenger;
};

std::vector<SeedOutcome> g_runs;

ArmStats stats_of(const PolicyEvaluation& e) {
    return {e.summary.profit.mean, e.summary.violation_minutes.mean, e.summary.stable_pct.mean};
}

Verdict directional_profit(const fs::path& config_path, const fs::path& workdir) {
    const auto t0 = Clock::now();
    g_runs.clear();
    const ExperimentConfig base = load_config(config_path);
    std::string detail;
    bool pass = true;
    for (const double p : {0.5, 0.9}) {
        ExperimentConfig cfg = base;
        cfg.traces.profile.p_true = p;
        cfg.seeds = {1, 2, 3, 4};
        const ExperimentData data = prepare_data(cfg);
        int wins = 0;
        for (const auto seed : cfg.seeds) {
            TrainingRun run = train_agent(cfg, data, seed);
            SeedOutcome o{seed, p, {}, {}, {}};
            o.agent = stats_of(evaluate_policy(cfg, data, PolicyKind::Agent, &run.agent));
            o.fixed = stats_of(evaluate_policy(cfg, data, PolicyKind::Fixed, nullptr));
            o.scavenger = stats_of(evaluate_policy(cfg, data, PolicyKind::Scavenger, nullptr));
            const bool win = o.agent.profit > std::max(o.fixed.profit, o.scavenger.profit) &&
                             o.agent.violation < std::min(o.fixed.violation, o.scavenger.violation);
            wins += win ? 1 : 0;
            std::cout << "  [7] p_true=" << fmt(p, 1) << " seed " << seed << ": agent profit "
                      << fmt(o.agent.profit) << " viol " << fmt(o.agent.violation, 1) << " stable "
                      << fmt(o.agent.stable) << " | fixed " << fmt(o.fixed.profit) << " / "
                      << fmt(o.fixed.violation, 1) << " | scavenger " << fmt(o.scavenger.profit) << " / "
                      << fmt(o.scavenger.violation, 1) << (win ? "  win" : "  loss") << std::endl;
            g_runs.push_back(o);
        }
        pass = pass && wins >= 3;
        detail += "p=" + fmt(p, 1) + ": " + std::to_string(wins) + "/4 seeds; ";
    }
    std::ofstream csv(workdir / "directional_runs.csv");
    csv << "p_true,seed,policy,profit,violation_min,stable_pct\n";
    for (const auto& o : g_runs) {
        for (const auto& [name, arm] : {std::pair{"agent", o.agent}, std::pair{"fixed", o.fixed},
                                        std::pair{"scavenger", o.scavenger}}) {
            csv << format_double(o.p_true) << ',' << o.seed << ',' << name << ',' << format_double(arm.profit)
                << ',' << format_double(arm.violation) << ',' << format_double(arm.stable) << '\n';
        }
    }
    const double elapsed = seconds_since(t0);
    pass = pass && elapsed < 1800.0;
    return {pass, detail + fmt(elapsed / 60.0, 1) + " min"};
}

Verdict stable_share() {
    if (g_runs.empty()) {
        return {false, "needs the runs of criterion 7"};
    }
    bool below = true;
    double worst = 0.0;
    int monotone = 0;
    int pairs = 0;
    for (const auto& lo : g_runs) {
        below = below && lo.agent.stable < 0.25;
        worst = std::max(worst, lo.agent.stable);
        if (lo.p_true != 0.5) continue;
        for (const auto& hi : g_runs) {
            if (hi.p_true == 0.9 && hi.seed == lo.seed) {
                ++pairs;
                monotone += hi.agent.stable > lo.agent.stable ? 1 : 0;
            }
        }
    }
    const bool pass = below && pairs > 0 && monotone * 2 > pairs;
    return {pass, "max stable share " + fmt(worst) + " (limit 0.25), higher at p=0.9 in " + std::to_string(monotone) +
                      "/" + std::to_string(pairs) + " seeds"};
}

// --- 9: determinism ---------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism(const fs::path& config_path, const fs::path& workdir) {
    ExperimentConfig cfg = load_config(config_path);
    cfg.traces.days = 10;
    cfg.episodes = 12;
    cfg.seeds = {1, 2};
    std::array<fs::path, 2> roots{workdir / "determinism_a", workdir / "determinism_b"};
    for (const auto& root : roots) {
        fs::remove_all(root);
        const auto ckpts = run_training(cfg, root / "train");
        run_evaluation(cfg, ckpts.at(0), root / "eval");
        run_comparison(cfg, ckpts.at(1), root / "compare");
    }
    std::size_t files = 0;
    std::vector<std::string> differing;
    for (const auto& entry : fs::recursive_directory_iterator(roots[0])) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), roots[0]);
        ++files;
        if (!fs::exists(roots[1] / rel) || slurp(entry.path()) != slurp(roots[1] / rel)) {
            differing.push_back(rel.string());
        }
    }
    std::string detail = std::to_string(files) + " output files compared";
    for (const auto& d : differing) detail += ", differs: " + d;
    return {files > 0 && differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    fs::path workdir = fs::temp_directory_path() / "ephemix_acceptance";
    fs::path config_path = fs::path(EPHEMIX_SOURCE_DIR) / "configs" / "default.json";
    std::set<int> only;
    std::set<int> tolerate;
    app.add_option("--workdir", workdir, "Directory for run artefacts");
    app.add_option("--config", config_path, "Experiment config for criteria 7-9")->check(CLI::ExistingFile);
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--tolerate", tolerate, "Criteria whose failure does not fail the run");
    CLI11_PARSE(app, argc, argv);

    fs::create_directories(workdir);
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"volatility estimator exactness", volatility_exactness},
        {"volatility estimator consistency", volatility_consistency},
        {"reward and economics oracles", economics_oracles},
        {"environment conservation", environment_conservation},
        {"Q-network gradient check", gradient_check_suite},
        {"DQN matches value iteration", dqn_value_iteration},
        {"agent beats Fixed and Scavenger", [&] { return directional_profit(config_path, workdir); }},
        {"stable share below 25% and rising with volatility", stable_share},
        {"byte-identical repeated runs", [&] { return determinism(config_path, workdir); }},
    };

    int hard_failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.contains(id)) continue;
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const bool tolerated = !v.pass && tolerate.contains(id);
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first << " -- "
                  << v.detail << (tolerated ? " [tolerated]" : "") << std::endl;
        hard_failures += (v.pass || tolerated) ? 0 : 1;
    }
    return hard_failures == 0 ? 0 : 1;
}
