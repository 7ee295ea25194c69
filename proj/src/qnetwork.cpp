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

#include "ephemix/qnetwork.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ephemix/errors.hpp"

namespace ephemix {

namespace {

constexpr const char* kMagic = "ephemix-qnet";
constexpr int kFormatVersion = 1;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string hexfloat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw ParseError("bad number '" + s + "' in checkpoint");
    }
    return v;
}

void expect_key(std::istream& in, const std::string& key) {
    std::string got;
    if (!(in >> got) || got != key) {
        throw ParseError("checkpoint: expected '" + key + "', got '" + got + "'");
    }
}

}  // namespace

void validate(const TrainingConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) {
        throw ValidationError("learning rate must be positive");
    }
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
        throw ValidationError("discount must lie in [0,1)");
    }
    if (cfg.batch_size == 0) {
        throw ValidationError("batch size must be positive");
    }
}

Optimizer parse_optimizer(const std::string& name) {
    if (name == "sgd") {
        return Optimizer::Sgd;
    }
    if (name == "adam") {
        return Optimizer::Adam;
    }
    throw ConfigError("unknown optimizer '" + name + "'");
}

std::string to_string(Optimizer opt) { return opt == Optimizer::Adam ? "adam" : "sgd"; }

QNetwork::QNetwork(std::vector<std::size_t> widths, std::uint64_t seed) : widths_(std::move(widths)), seed_(seed) {
    build_layout();
    std::mt19937_64 rng(seed);
    for (const auto& layer : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < layer.in * layer.out + layer.out; ++i) {
            params_[layer.weight_offset + i] = dist(rng);
        }
    }
}

QNetwork QNetwork::zeros(std::vector<std::size_t> widths) {
    QNetwork net;
    net.widths_ = std::move(widths);
    net.build_layout();
    return net;
}

QNetwork QNetwork::standard(std::uint64_t seed) { return QNetwork({6, 24, 24, 5}, seed); }

void QNetwork::build_layout() {
    if (widths_.size() < 2 || std::any_of(widths_.begin(), widths_.end(), [](std::size_t w) { return w == 0; })) {
        throw ValidationError("network needs at least an input and an output layer of positive width");
    }
    layers_.clear();
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        Layer layer{widths_[l], widths_[l + 1], offset, offset + widths_[l] * widths_[l + 1]};
        offset = layer.bias_offset + layer.out;
        layers_.push_back(layer);
    }
    params_.assign(offset, 0.0);
}

void QNetwork::set_parameters(std::span<const double> values) {
    if (values.size() != params_.size()) {
        throw std::invalid_argument("parameter count mismatch");
    }
    std::copy(values.begin(), values.end(), params_.begin());
}

void QNetwork::predict(std::span<const double> input, std::span<double> out) const {
    // Two ping-pong buffers sized to the widest layer.
    thread_local std::vector<double> a;
    thread_local std::vector<double> b;
    const std::size_t widest = *std::max_element(widths_.begin(), widths_.end());
    a.assign(input.begin(), input.end());
    b.resize(widest);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        const bool last = l + 1 == layers_.size();
        const double* w = params_.data() + layer.weight_offset;
        const double* bias = params_.data() + layer.bias_offset;
        b.resize(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double z = bias[o];
            const double* row = w + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) {
                z += row[i] * a[i];
            }
            b[o] = last ? z : std::max(z, 0.0);
        }
        std::swap(a, b);
    }
    std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(out.size()), out.begin());
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
    if (input.size() != input_size()) {
        throw std::invalid_argument("forward: expected " + std::to_string(input_size()) + " inputs, got " +
                                    std::to_string(input.size()));
    }
    if (!all_finite(input)) {
        throw std::invalid_argument("forward: non-finite input");
    }
    std::vector<double> out(output_size());
    predict(input, out);
    return out;
}

void QNetwork::forward_cached(std::span<const double> input, std::vector<std::vector<double>>& acts) const {
    // acts[0] = input, acts[l+1] = post-activation output of layer l.
    acts.resize(layers_.size() + 1);
    acts[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        const bool last = l + 1 == layers_.size();
        const double* w = params_.data() + layer.weight_offset;
        const double* bias = params_.data() + layer.bias_offset;
        auto& out = acts[l + 1];
        out.resize(layer.out);
        const auto& in = acts[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            double z = bias[o];
            const double* row = w + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) {
                z += row[i] * in[i];
            }
            out[o] = last ? z : std::max(z, 0.0);
        }
    }
}

void QNetwork::backward(std::span<const double> dq, std::span<double> grad,
                        const std::vector<std::vector<double>>& acts) const {
    thread_local std::vector<double> delta;
    thread_local std::vector<double> prev;
    delta.assign(dq.begin(), dq.end());
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const double* w = params_.data() + layer.weight_offset;
        double* gw = grad.data() + layer.weight_offset;
        double* gb = grad.data() + layer.bias_offset;
        const auto& in = acts[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) {
                continue;
            }
            gb[o] += d;
            double* grow = gw + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) {
                grow[i] += d * in[i];
            }
        }
        if (l == 0) {
            break;
        }
        prev.assign(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) {
                continue;
            }
            const double* row = w + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) {
                prev[i] += row[i] * d;
            }
        }
        // ReLU derivative; acts[l] is the post-activation of layer l-1.
        for (std::size_t i = 0; i < layer.in; ++i) {
            if (in[i] <= 0.0) {
                prev[i] = 0.0;
            }
        }
        std::swap(delta, prev);
    }
}

std::vector<double> QNetwork::output_gradient(std::span<const double> input,
                                              std::span<const double> output_weights) const {
    if (input.size() != input_size() || output_weights.size() != output_size()) {
        throw std::invalid_argument("output_gradient: size mismatch");
    }
    std::vector<double> grad(params_.size(), 0.0);
    std::vector<std::vector<double>> acts;
    forward_cached(input, acts);
    backward(output_weights, grad, acts);
    return grad;
}

double QNetwork::train_batch(std::span<const double> inputs, std::span<const double> targets,
                             std::span<const int> actions, const TrainingConfig& cfg) {
    const std::size_t n = actions.size();
    const std::size_t in = input_size();
    const std::size_t out = output_size();
    if (n == 0 || inputs.size() != n * in || targets.size() != n * out) {
        throw std::invalid_argument("train_batch: inconsistent batch sizes");
    }

    thread_local std::vector<double> grad;
    thread_local std::vector<std::vector<double>> acts;
    thread_local std::vector<double> dq;
    grad.assign(params_.size(), 0.0);
    dq.assign(out, 0.0);

    double loss = 0.0;
    const double scale = 2.0 / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
        const int a = actions[s];
        if (a < 0 || static_cast<std::size_t>(a) >= out) {
            throw std::invalid_argument("train_batch: action index out of range");
        }
        const auto x = inputs.subspan(s * in, in);
        forward_cached(x, acts);
        const double q = acts.back()[static_cast<std::size_t>(a)];
        const double err = q - targets[s * out + static_cast<std::size_t>(a)];
        loss += err * err;
        dq[static_cast<std::size_t>(a)] = scale * err;
        backward(dq, grad, acts);
        dq[static_cast<std::size_t>(a)] = 0.0;
    }
    loss /= static_cast<double>(n);

    if (!std::isfinite(loss) || !all_finite(grad)) {
        throw NumericError("non-finite gradient at training step " + std::to_string(train_steps_) +
                           " (loss=" + std::to_string(loss) + ")");
    }

    if (cfg.optimizer == Optimizer::Sgd) {
        for (std::size_t i = 0; i < params_.size(); ++i) {
            params_[i] -= cfg.learning_rate * grad[i];
        }
    } else {
        if (adam_m_.size() != params_.size()) {
            adam_m_.assign(params_.size(), 0.0);
            adam_v_.assign(params_.size(), 0.0);
            adam_t_ = 0;
        }
        ++adam_t_;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t_));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            adam_m_[i] = cfg.adam_beta1 * adam_m_[i] + (1.0 - cfg.adam_beta1) * grad[i];
            adam_v_[i] = cfg.adam_beta2 * adam_v_[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
            const double m_hat = adam_m_[i] / c1;
            const double v_hat = adam_v_[i] / c2;
            params_[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
        }
    }
    if (!all_finite(params_)) {
        throw NumericError("non-finite weights after training step " + std::to_string(train_steps_));
    }
    ++train_steps_;
    return loss;
}

void QNetwork::save(std::ostream& out) const {
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "widths";
    for (auto w : widths_) {
        out << ' ' << w;
    }
    out << '\n';
    out << "seed " << seed_ << '\n';
    out << "train_steps " << train_steps_ << '\n';
    out << "params " << params_.size() << '\n';
    for (double p : params_) {
        out << hexfloat(p) << '\n';
    }
}

QNetwork QNetwork::load(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) {
        throw ParseError("not a Q-network checkpoint");
    }
    if (version != kFormatVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    std::string line;
    expect_key(in, "widths");
    std::getline(in, line);
    std::istringstream ws(line);
    std::vector<std::size_t> widths;
    for (std::size_t w; ws >> w;) {
        widths.push_back(w);
    }
    QNetwork net = zeros(widths);
    expect_key(in, "seed");
    in >> net.seed_;
    expect_key(in, "train_steps");
    in >> net.train_steps_;
    expect_key(in, "params");
    std::size_t count = 0;
    in >> count;
    if (!in || count != net.params_.size()) {
        throw ParseError("checkpoint parameter count does not match its layer sizes");
    }
    for (auto& p : net.params_) {
        std::string tok;
        if (!(in >> tok)) {
            throw ParseError("checkpoint truncated");
        }
        p = parse_hexfloat(tok);
    }
    return net;
}

double gradient_check(const QNetwork& net, std::span<const double> input, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) {
        throw std::invalid_argument("gradient_check: eps must lie in (0, 1e-2]");
    }
    const auto half_sq = [&](const QNetwork& n) {
        const auto q = n.forward(input);
        double s = 0.0;
        for (double v : q) {
            s += 0.5 * v * v;
        }
        return s;
    };
    // d/dtheta of 0.5*sum q^2 = sum_k q_k dq_k/dtheta.
    const auto q = net.forward(input);
    const auto analytic = net.output_gradient(input, q);

    QNetwork probe = net;
    std::vector<double> theta(net.parameters().begin(), net.parameters().end());
    double worst = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + eps;
        probe.set_parameters(theta);
        const double up = half_sq(probe);
        theta[i] = saved - eps;
        probe.set_parameters(theta);
        const double down = half_sq(probe);
        theta[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

}  // namespace ephemix
