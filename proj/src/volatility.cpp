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

#include "ephemix/volatility.hpp"

#include "ephemix/errors.hpp"

namespace ephemix {

VolatilityEstimate estimate_volatility(std::span<const TraceSample> samples) {
    if (samples.empty()) {
        throw ValidationError("volatility of an empty window is undefined");
    }
    std::size_t count = 0;
    for (const auto& s : samples) {
        count += static_cast<std::size_t>(indicator_z(s));
    }
    return {static_cast<double>(count) / static_cast<double>(samples.size()), samples.size(), count};
}

VolatilityEstimate estimate_volatility(const TraceWindow& window) {
    return estimate_volatility(std::span<const TraceSample>(window.samples));
}

double pool_volatility(std::span<const std::pair<HostSpec, VolatilityEstimate>> hosts) {
    if (hosts.empty()) {
        throw ValidationError("pool volatility needs at least one host");
    }
    double weighted = 0.0;
    double cores = 0.0;
    for (const auto& [host, est] : hosts) {
        validate(host);
        weighted += host.cpu_cores * est.p_hat;
        cores += host.cpu_cores;
    }
    return weighted / cores;
}

}  // namespace ephemix
