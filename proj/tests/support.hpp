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

#ifndef EPHEMIX_TESTS_SUPPORT_HPP
#define EPHEMIX_TESTS_SUPPORT_HPP

#include <cstdint>
#include <vector>

#include "ephemix/traces.hpp"

namespace ephemix::testing {

// Window whose every step has the given used/predicted fractions on both metrics.
inline TraceWindow flat_window(std::size_t n, double used, double pred, HostSpec host = {64, 256}) {
    TraceWindow w{host, {}};
    for (std::size_t t = 0; t < n; ++t) {
        w.samples.push_back({static_cast<std::int64_t>(t), used, used, pred, pred});
    }
    return w;
}

inline TraceWindow window_from(std::vector<TraceSample> samples, HostSpec host = {64, 256}) {
    for (std::size_t t = 0; t < samples.size(); ++t) {
        samples[t].t = static_cast<std::int64_t>(t);
    }
    return TraceWindow{host, std::move(samples)};
}

}  // namespace ephemix::testing

#endif  // EPHEMIX_TESTS_SUPPORT_HPP
