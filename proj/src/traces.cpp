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

#include "ephemix/traces.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "ephemix/errors.hpp"
#include "ephemix/text.hpp"

namespace ephemix {

namespace {

constexpr std::string_view kHeader = "t,cpu_used,mem_used,cpu_pred,mem_pred";

// Keeps underestimation strict when the shock would push actual usage past 1.
constexpr double kMaxPrediction = 0.98;
constexpr double kMinShock = 0.005;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::array<std::string_view, 5> split_row(std::string_view line, std::size_t line_no) {
    std::array<std::string_view, 5> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (n == fields.size()) {
            throw ParseError("expected 5 fields", line_no);
        }
        fields[n++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (n != fields.size()) {
        throw ParseError("expected 5 fields, got " + std::to_string(n), line_no);
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* column) {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw ParseError(std::string("bad value for ") + column + ": '" + std::string(field) + "'",
                         line_no);
    }
    return value;
}

}  // namespace

void validate(const HostSpec& host) {
    if (host.cpu_cores <= 0 || host.mem_gb <= 0) {
        throw ValidationError("host capacity must be strictly positive");
    }
}

void validate(const TraceSample& s) {
    if (!in_unit_interval(s.cpu_used) || !in_unit_interval(s.mem_used) ||
        !in_unit_interval(s.cpu_pred) || !in_unit_interval(s.mem_pred)) {
        throw ValidationError("utilization outside [0,1] at t=" + std::to_string(s.t));
    }
}

void validate(const TraceWindow& window) {
    validate(window.host);
    for (std::size_t i = 0; i < window.samples.size(); ++i) {
        const auto& s = window.samples[i];
        if (s.t != static_cast<std::int64_t>(i)) {
            throw ValidationError("window step indices must be consecutive from 0");
        }
        validate(s);
    }
}

void validate(const GeneratorProfile& p) {
    validate(p.host);
    if (!(p.p_true >= 0.0 && p.p_true <= 1.0)) {
        throw ValidationError("p_true must lie in [0,1]");
    }
    if (p.window_len == 0) {
        throw ValidationError("window length must be positive");
    }
    if (p.noise_scale < 0.0 || p.shock_scale < 0.0 || p.diurnal_amplitude < 0.0) {
        throw ValidationError("generator scales must be non-negative");
    }
}

std::vector<TraceWindow> parse_traces(std::istream& in, const HostSpec& host, std::size_t window_len) {
    validate(host);
    if (window_len == 0) {
        throw ValidationError("window length must be positive");
    }

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty trace file", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kHeader) {
        throw ParseError("header must be '" + std::string(kHeader) + "'", line_no);
    }

    std::vector<TraceWindow> windows;
    TraceWindow current{host, {}};
    current.samples.reserve(window_len);
    std::int64_t expected_t = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_row(line, line_no);
        TraceSample s;
        s.t = parse_number<std::int64_t>(f[0], line_no, "t");
        s.cpu_used = parse_number<double>(f[1], line_no, "cpu_used");
        s.mem_used = parse_number<double>(f[2], line_no, "mem_used");
        s.cpu_pred = parse_number<double>(f[3], line_no, "cpu_pred");
        s.mem_pred = parse_number<double>(f[4], line_no, "mem_pred");
        if (s.t != expected_t) {
            throw ParseError("step index " + std::to_string(s.t) + " out of sequence (expected " +
                                 std::to_string(expected_t) + ")",
                             line_no);
        }
        ++expected_t;
        try {
            validate(s);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        s.t = static_cast<std::int64_t>(current.samples.size());
        current.samples.push_back(s);
        if (current.samples.size() == window_len) {
            windows.push_back(std::move(current));
            current = TraceWindow{host, {}};
            current.samples.reserve(window_len);
        }
    }
    return windows;
}

std::vector<TraceWindow> load_traces(const std::filesystem::path& path, const HostSpec& host,
                                     std::size_t window_len) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open trace file " + path.string());
    }
    return parse_traces(in, host, window_len);
}

void write_traces(std::ostream& out, std::span<const TraceWindow> windows) {
    out << kHeader << '\n';
    std::int64_t t = 0;
    for (const auto& w : windows) {
        for (const auto& s : w.samples) {
            out << t++ << ',' << format_double(s.cpu_used) << ',' << format_double(s.mem_used) << ','
                << format_double(s.cpu_pred) << ',' << format_double(s.mem_pred) << '\n';
        }
    }
}

void write_traces(const std::filesystem::path& path, std::span<const TraceWindow> windows) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_traces(out, windows);
}

std::vector<TraceWindow> generate_synthetic(std::uint64_t seed, int days, const GeneratorProfile& profile) {
    validate(profile);
    if (days < 1) {
        throw ValidationError("days must be at least 1");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto w_len = profile.window_len;
    std::vector<TraceWindow> windows;
    windows.reserve(static_cast<std::size_t>(days));
    for (int d = 0; d < days; ++d) {
        TraceWindow w{profile.host, {}};
        w.samples.reserve(w_len);
        for (std::size_t i = 0; i < w_len; ++i) {
            // Trough at midnight, peak at noon.
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(w_len);
            const double diurnal = -profile.diurnal_amplitude * std::cos(phase);

            TraceSample s;
            s.t = static_cast<std::int64_t>(i);
            s.cpu_pred = std::clamp(profile.base_cpu + diurnal + profile.noise_scale * noise(rng), 0.0,
                                    kMaxPrediction);
            s.mem_pred = std::clamp(profile.base_mem + diurnal + profile.noise_scale * noise(rng), 0.0,
                                    kMaxPrediction);

            const bool underestimated = unit(rng) < profile.p_true;
            if (underestimated) {
                const double cpu_shock = kMinShock + std::abs(profile.shock_scale * noise(rng));
                const double mem_shock = kMinShock + std::abs(profile.shock_scale * noise(rng));
                s.cpu_used = std::min(s.cpu_pred + cpu_shock, 1.0);
                s.mem_used = std::min(s.mem_pred + mem_shock, 1.0);
            } else {
                s.cpu_used = std::max(s.cpu_pred - std::abs(profile.noise_scale * noise(rng)), 0.0);
                s.mem_used = std::max(s.mem_pred - std::abs(profile.noise_scale * noise(rng)), 0.0);
            }
            w.samples.push_back(s);
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

std::vector<Prediction> SeasonalNaiveForecaster::forecast(std::span<const TraceWindow> history) const {
    if (history.empty()) {
        throw ValidationError("forecast requires a non-empty history");
    }
    const auto& last = history.back();
    std::vector<Prediction> out;
    out.reserve(last.size());
    for (const auto& s : last.samples) {
        out.push_back({s.cpu_used, s.mem_used});
    }
    return out;
}

std::unique_ptr<Forecaster> make_forecaster(const std::string& name) {
    if (name == "seasonal_naive") {
        return std::make_unique<SeasonalNaiveForecaster>();
    }
    throw ConfigError("unknown forecaster '" + name + "'");
}

std::vector<Prediction> forecast_next_window(std::span<const TraceWindow> history) {
    return SeasonalNaiveForecaster{}.forecast(history);
}

std::vector<TraceWindow> reforecast(std::span<const TraceWindow> windows, const Forecaster& forecaster) {
    std::vector<TraceWindow> out(windows.begin(), windows.end());
    for (std::size_t k = 1; k < out.size(); ++k) {
        const auto preds = forecaster.forecast(windows.subspan(0, k));
        if (preds.size() != out[k].size()) {
            throw ValidationError("forecaster '" + forecaster.name() + "' returned " +
                                  std::to_string(preds.size()) + " steps for a window of " +
                                  std::to_string(out[k].size()));
        }
        for (std::size_t i = 0; i < preds.size(); ++i) {
            out[k].samples[i].cpu_pred = preds[i].cpu;
            out[k].samples[i].mem_pred = preds[i].mem;
        }
    }
    return out;
}

}  // namespace ephemix
