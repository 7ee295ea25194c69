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


#ifndef EPHEMIX_METRICS_HPP
#define EPHEMIX_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ephemix/economics.hpp"

namespace ephemix {

/// One settled time step, as written to the event log.
struct StepRecord {
    std::size_t t = 0;
    // Micro-action codes; allocation and recovery phases separated by ';'.
    std::string actions;
    std::int64_t rem = 0;
    std::int64_t alloc_e = 0;
    std::int64_t alloc_s = 0;
    std::int64_t lost_units = 0;
    double reward = 0.0;
    bool violated = false;
    // Units asked for this step; ephemeral units beyond it are not billed.
    std::int64_t request = std::numeric_limits<std::int64_t>::max();
};

struct EpisodeResult {
    std::size_t episode = 0;
    double total_reward = 0.0;
    DailyLedger ledger;
    double profit = 0.0;
    std::int64_t lost_units = 0;
    // Stable unit-steps over all allocated unit-steps; 0 when nothing was allocated.
    double stable_pct = 0.0;
    double p = 0.0;
};

/// Sums step records into an EpisodeResult. Unit-steps are counted as integers and
/// converted to hours once, so the figures are exactly recomputable from a log.
class EpisodeAccumulator {
public:
    explicit EpisodeAccumulator(CostModel model) : model_(model) {}

    void add(const StepRecord& r);
    EpisodeResult finish(const PenaltySchedule& schedule, std::size_t episode = 0, double p = 0.0) const;

    std::int64_t ephemeral_unit_steps() const { return e_steps_; }
    std::int64_t stable_unit_steps() const { return s_steps_; }
    std::int64_t violated_steps() const { return violated_steps_; }

private:
    CostModel model_;
    double reward_ = 0.0;
    std::int64_t e_steps_ = 0;
    std::int64_t s_steps_ = 0;
    std::int64_t violated_steps_ = 0;
    std::int64_t lost_ = 0;
};

struct SummaryStat {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct Summary {
    std::size_t days = 0;
    SummaryStat profit;
    SummaryStat violation_minutes;
    SummaryStat ephemeral_unit_hours;
    SummaryStat stable_pct;
    double total_profit = 0.0;
};

Summary summarize(std::span<const EpisodeResult> results);

/// Header: day,t,actions,rem,alloc_e,alloc_s,lost_units,reward,violated
void write_event_header(std::ostream& out);
void write_event_row(std::ostream& out, std::size_t day, const StepRecord& r);

/// Header: day,profit,violation_min,ephem_unit_hours,stable_unit_hours,stable_pct,lost_units,total_reward,p
void write_day_header(std::ostream& out);
void write_day_row(std::ostream& out, const EpisodeResult& r);

void write_summary(std::ostream& out, const std::string& label, const Summary& s);

}  // namespace ephemix

#endif  // EPHEMIX_METRICS_HPP
