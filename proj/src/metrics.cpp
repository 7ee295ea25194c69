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


#include "ephemix/metrics.hpp"

#include <algorithm>
#include <ostream>

#include "ephemix/text.hpp"

namespace ephemix {

void EpisodeAccumulator::add(const StepRecord& r) {
    reward_ += r.reward;
    e_steps_ += std::min(r.alloc_e, r.request);
    s_steps_ += r.alloc_s;
    lost_ += r.lost_units;
    if (r.violated) {
        ++violated_steps_;
    }
}

EpisodeResult EpisodeAccumulator::finish(const PenaltySchedule& schedule, std::size_t episode, double p) const {
    EpisodeResult out;
    out.episode = episode;
    out.p = p;
    out.total_reward = reward_;
    out.lost_units = lost_;
    out.ledger.ephemeral_unit_hours = static_cast<double>(e_steps_) * model_.step_minutes / 60.0;
    out.ledger.stable_unit_hours = static_cast<double>(s_steps_) * model_.step_minutes / 60.0;
    out.ledger.violation_minutes = static_cast<double>(violated_steps_) * model_.step_minutes;
    out.profit = daily_profit(out.ledger, model_, schedule);
    const std::int64_t total = e_steps_ + s_steps_;
    out.stable_pct = total > 0 ? static_cast<double>(s_steps_) / static_cast<double>(total) : 0.0;
    return out;
}

namespace {

template <typename F>
SummaryStat stat_of(std::span<const EpisodeResult> results, F field) {
    SummaryStat s;
    if (results.empty()) {
        return s;
    }
    s.min = s.max = field(results.front());
    double sum = 0.0;
    for (const auto& r : results) {
        const double v = field(r);
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(results.size());
    return s;
}

}  // namespace

Summary summarize(std::span<const EpisodeResult> results) {
    Summary s;
    s.days = results.size();
    s.profit = stat_of(results, [](const EpisodeResult& r) { return r.profit; });
    s.violation_minutes = stat_of(results, [](const EpisodeResult& r) { return r.ledger.violation_minutes; });
    s.ephemeral_unit_hours = stat_of(results, [](const EpisodeResult& r) { return r.ledger.ephemeral_unit_hours; });
    s.stable_pct = stat_of(results, [](const EpisodeResult& r) { return r.stable_pct; });
    for (const auto& r : results) {
        s.total_profit += r.profit;
    }
    return s;
}

void write_event_header(std::ostream& out) {
    out << "day,t,actions,rem,alloc_e,alloc_s,lost_units,reward,violated\n";
}

void write_event_row(std::ostream& out, std::size_t day, const StepRecord& r) {
    out << day << ',' << r.t << ',' << r.actions << ',' << r.rem << ',' << r.alloc_e << ',' << r.alloc_s << ','
        << r.lost_units << ',' << format_double(r.reward) << ',' << (r.violated ? 1 : 0) << '\n';
}

void write_day_header(std::ostream& out) {
    out << "day,profit,violation_min,ephem_unit_hours,stable_unit_hours,stable_pct,lost_units,total_reward,p\n";
}

void write_day_row(std::ostream& out, const EpisodeResult& r) {
    out << r.episode << ',' << format_double(r.profit) << ',' << format_double(r.ledger.violation_minutes) << ','
        << format_double(r.ledger.ephemeral_unit_hours) << ',' << format_double(r.ledger.stable_unit_hours) << ','
        << format_double(r.stable_pct) << ',' << r.lost_units << ',' << format_double(r.total_reward) << ','
        << format_double(r.p) << '\n';
}

void write_summary(std::ostream& out, const std::string& label, const Summary& s) {
    const auto line = [&](const char* name, const SummaryStat& st) {
        out << "  " << name << ": mean " << format_double(st.mean) << ", min " << format_double(st.min) << ", max "
            << format_double(st.max) << '\n';
    };
    out << label << " (" << s.days << " days)\n";
    line("profit", s.profit);
    line("violation_min", s.violation_minutes);
    line("ephem_unit_hours", s.ephemeral_unit_hours);
    line("stable_pct", s.stable_pct);
    out << "  total_profit: " << format_double(s.total_profit) << '\n';
}

}  // namespace ephemix
