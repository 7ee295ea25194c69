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

#ifndef EPHEMIX_ECONOMICS_HPP
#define EPHEMIX_ECONOMICS_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace ephemix {

/// Hourly unit prices. Ephemeral units earn `cpe`, stable units cost `cps`, and every
/// missing unit is charged `cpv` in the learning reward.
struct CostModel {
    double cpe = 0.0317;
    double cps = 0.0928;
    double cpv = 2.0 * 0.0928;
    double step_minutes = 3.0;

    double step_hours() const { return step_minutes / 60.0; }
};

void validate(const CostModel& model);

struct PenaltyTier {
    double lower_exclusive = 0.0;
    double upper_inclusive = std::numeric_limits<double>::infinity();
    double discount = 0.0;
};

/// Daily SLA discount as a function of cumulative violation minutes.
struct PenaltySchedule {
    std::vector<PenaltyTier> tiers;

    /// (15,120] -> 10%, (120,720] -> 15%, (720,inf) -> 30%.
    static PenaltySchedule standard();
};

void validate(const PenaltySchedule& schedule);

/// One day of resource usage and violation time.
struct DailyLedger {
    double ephemeral_unit_hours = 0.0;
    double stable_unit_hours = 0.0;
    double violation_minutes = 0.0;
};

inline constexpr double kMinutesPerDay = 1440.0;

void validate(const DailyLedger& ledger);

/// Per-step reward: alloc_e*CPE - alloc_s*CPS - rem*CPV with hourly prices prorated
/// to one step.
double step_reward(std::int64_t alloc_e, std::int64_t alloc_s, std::int64_t rem, const CostModel& model);

/// Discount of the tier holding `violation_minutes`; 0 below the first tier.
double discount(double violation_minutes, const PenaltySchedule& schedule);

/// Ephemeral revenue minus stable cost minus the SLA discount on ephemeral revenue.
double daily_profit(const DailyLedger& ledger, const CostModel& model, const PenaltySchedule& schedule);

}  // namespace ephemix

#endif  // EPHEMIX_ECONOMICS_HPP
