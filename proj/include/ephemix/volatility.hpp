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

#ifndef EPHEMIX_VOLATILITY_HPP
#define EPHEMIX_VOLATILITY_HPP

#include <cstddef>
#include <span>
#include <utility>

#include "ephemix/traces.hpp"

namespace ephemix {

/// Empirical probability that the forecast underestimated demand over one window.
struct VolatilityEstimate {
    double p_hat = 0.0;
    std::size_t window_len = 0;
    std::size_t underestimation_count = 0;

    bool operator==(const VolatilityEstimate&) const = default;
};

/// 1 when either CPU or memory usage exceeded its prediction. Exact hits count as 0;
/// only the sign of the error matters.
inline int indicator_z(const TraceSample& s) {
    return (s.cpu_pred < s.cpu_used || s.mem_pred < s.mem_used) ? 1 : 0;
}

VolatilityEstimate estimate_volatility(std::span<const TraceSample> samples);
VolatilityEstimate estimate_volatility(const TraceWindow& window);

/// Pool-level rate: per-host p_hat averaged with CPU-capacity weights.
double pool_volatility(std::span<const std::pair<HostSpec, VolatilityEstimate>> hosts);

}  // namespace ephemix

#endif  // EPHEMIX_VOLATILITY_HPP
