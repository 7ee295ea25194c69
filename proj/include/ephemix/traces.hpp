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

#ifndef EPHEMIX_TRACES_HPP
#define EPHEMIX_TRACES_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ephemix {

/// Steps per day at the default 3-minute sampling period.
inline constexpr std::size_t kDefaultWindowLength = 480;

/// One row of a host utilization trace. Utilizations are host-level fractions in [0,1].
struct TraceSample {
    std::int64_t t = 0;
    double cpu_used = 0.0;
    double mem_used = 0.0;
    double cpu_pred = 0.0;
    double mem_pred = 0.0;

    // Prediction errors (pred - actual); negative means the forecast underestimated.
    double cpu_error() const { return cpu_pred - cpu_used; }
    double mem_error() const { return mem_pred - mem_used; }

    bool operator==(const TraceSample&) const = default;
};

struct HostSpec {
    int cpu_cores = 0;
    int mem_gb = 0;

    bool operator==(const HostSpec&) const = default;
};

/// One Δt period (one simulated day by default) of a single host.
struct TraceWindow {
    HostSpec host;
    std::vector<TraceSample> samples;

    std::size_t size() const { return samples.size(); }
    bool operator==(const TraceWindow&) const = default;
};

struct GeneratorProfile {
    HostSpec host{64, 256};
    std::size_t window_len = kDefaultWindowLength;
    double base_cpu = 0.45;
    double base_mem = 0.45;
    double diurnal_amplitude = 0.08;
    double noise_scale = 0.02;
    // Standard deviation of the positive actual-minus-prediction shock injected
    // on underestimated steps.
    double shock_scale = 0.04;
    double p_true = 0.5;
};

/// Predicted (cpu, mem) fractions for one step.
struct Prediction {
    double cpu = 0.0;
    double mem = 0.0;

    bool operator==(const Prediction&) const = default;
};

void validate(const HostSpec& host);
void validate(const TraceSample& sample);
void validate(const TraceWindow& window);
void validate(const GeneratorProfile& profile);

/// Reads a trace CSV (header `t,cpu_used,mem_used,cpu_pred,mem_pred`) and cuts it into
/// consecutive windows of `window_len` rows. A trailing partial window is dropped.
/// Window sample indices restart at 0.
std::vector<TraceWindow> load_traces(const std::filesystem::path& path, const HostSpec& host,
                                     std::size_t window_len = kDefaultWindowLength);
std::vector<TraceWindow> parse_traces(std::istream& in, const HostSpec& host,
                                      std::size_t window_len = kDefaultWindowLength);

/// Writes windows back-to-back as one CSV; `t` continues across windows.
void write_traces(std::ostream& out, std::span<const TraceWindow> windows);
void write_traces(const std::filesystem::path& path, std::span<const TraceWindow> windows);

/// Diurnal synthetic utilization with a controlled underestimation probability.
/// Deterministic for a fixed seed.
std::vector<TraceWindow> generate_synthetic(std::uint64_t seed, int days,
                                            const GeneratorProfile& profile);

class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    /// Predicts the next window from the history (most recent window last).
    virtual std::vector<Prediction> forecast(std::span<const TraceWindow> history) const = 0;
};

/// Step t of the next window = actual utilization at step t of the last window.
class SeasonalNaiveForecaster final : public Forecaster {
public:
    std::string name() const override { return "seasonal_naive"; }
    std::vector<Prediction> forecast(std::span<const TraceWindow> history) const override;
};

std::unique_ptr<Forecaster> make_forecaster(const std::string& name);

std::vector<Prediction> forecast_next_window(std::span<const TraceWindow> history);

/// Replaces the embedded predictions of every window after the first with the
/// forecaster's output over the windows preceding it.
std::vector<TraceWindow> reforecast(std::span<const TraceWindow> windows, const Forecaster& forecaster);

}  // namespace ephemix

#endif  // EPHEMIX_TRACES_HPP
