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

#include "ephemix/economics.hpp"

#include "ephemix/errors.hpp"

namespace ephemix {

void validate(const CostModel& m) {
    if (m.cpe < 0.0 || m.cps < 0.0 || m.cpv < 0.0) {
        throw ValidationError("prices must be non-negative");
    }
    if (!(m.cpe < m.cps)) {
        throw ValidationError("ephemeral price must be below the stable price");
    }
    if (!(m.step_minutes > 0.0)) {
        throw ValidationError("step_minutes must be positive");
    }
}

PenaltySchedule PenaltySchedule::standard() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return PenaltySchedule{{{15.0, 120.0, 0.10}, {120.0, 720.0, 0.15}, {720.0, inf, 0.30}}};
}

void validate(const PenaltySchedule& s) {
    double prev_upper = -std::numeric_limits<double>::infinity();
    double prev_discount = 0.0;
    for (const auto& tier : s.tiers) {
        if (!(tier.lower_exclusive < tier.upper_inclusive)) {
            throw ValidationError("penalty tier has an empty range");
        }
        if (tier.lower_exclusive < prev_upper) {
            throw ValidationError("penalty tiers overlap or are out of order");
        }
        if (tier.discount < prev_discount || tier.discount > 1.0) {
            throw ValidationError("penalty discounts must be non-decreasing within [0,1]");
        }
        prev_upper = tier.upper_inclusive;
        prev_discount = tier.discount;
    }
}

void validate(const DailyLedger& l) {
    if (l.ephemeral_unit_hours < 0.0 || l.stable_unit_hours < 0.0 || l.violation_minutes < 0.0) {
        throw ValidationError("ledger entries must be non-negative");
    }
    if (l.violation_minutes > kMinutesPerDay) {
        throw ValidationError("violation minutes exceed one day");
    }
}

double step_reward(std::int64_t alloc_e, std::int64_t alloc_s, std::int64_t rem, const CostModel& m) {
    const double h = m.step_hours();
    return static_cast<double>(alloc_e) * (m.cpe * h) - static_cast<double>(alloc_s) * (m.cps * h) -
           static_cast<double>(rem) * (m.cpv * h);
}

double discount(double violation_minutes, const PenaltySchedule& schedule) {
    // Gaps between tiers keep the discount of the tier below, so the result stays monotone.
    double d = 0.0;
    for (const auto& tier : schedule.tiers) {
        if (violation_minutes > tier.lower_exclusive) {
            d = tier.discount;
        }
    }
    return d;
}

double daily_profit(const DailyLedger& ledger, const CostModel& m, const PenaltySchedule& schedule) {
    const double gross = ledger.ephemeral_unit_hours * m.cpe;
    const double sla_cost = gross * discount(ledger.violation_minutes, schedule);
    return gross - ledger.stable_unit_hours * m.cps - sla_cost;
}

}  // namespace ephemix
