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

#ifndef EPHEMIX_QNETWORK_HPP
#define EPHEMIX_QNETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ephemix {

enum class Optimizer { Sgd, Adam };

struct TrainingConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 50;
    double gamma = 0.95;
    Optimizer optimizer = Optimizer::Sgd;
    // Adam moments; unused by plain SGD.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-7;
};

void validate(const TrainingConfig& cfg);
Optimizer parse_optimizer(const std::string& name);
std::string to_string(Optimizer opt);

/// Fully connected Q-value approximator: ReLU hidden layers, linear output layer,
/// trained on the mean squared error of the taken action's output.
///
/// Parameters live in one flat vector, layer by layer, each layer as its row-major
/// weight matrix (out x in) followed by its bias vector.
class QNetwork {
public:
    /// Weights and biases drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    QNetwork(std::vector<std::size_t> widths, std::uint64_t seed);

    static QNetwork zeros(std::vector<std::size_t> widths);
    /// 6 -> 24 -> 24 -> 5.
    static QNetwork standard(std::uint64_t seed);

    const std::vector<std::size_t>& widths() const { return widths_; }
    std::size_t input_size() const { return widths_.front(); }
    std::size_t output_size() const { return widths_.back(); }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t train_steps() const { return train_steps_; }

    std::span<const double> parameters() const { return params_; }
    void set_parameters(std::span<const double> values);

    /// Throws std::invalid_argument for a wrong-sized or non-finite input.
    std::vector<double> forward(std::span<const double> input) const;

    /// Forward pass without validation into a caller-provided buffer of output_size().
    void predict(std::span<const double> input, std::span<double> out) const;

    /// One gradient step on (1/n) * sum_i (target_i[action_i] - Q(input_i)[action_i])^2.
    /// `inputs` and `targets` are row-major batches. Returns the loss before the update.
    double train_batch(std::span<const double> inputs, std::span<const double> targets,
                       std::span<const int> actions, const TrainingConfig& cfg);

    /// Gradient of sum_k w_k * Q_k(input) with respect to every parameter.
    std::vector<double> output_gradient(std::span<const double> input, std::span<const double> output_weights) const;

    void save(std::ostream& out) const;
    static QNetwork load(std::istream& in);

private:
    QNetwork() = default;

    struct Layer {
        std::size_t in;
        std::size_t out;
        std::size_t weight_offset;
        std::size_t bias_offset;
    };

    void build_layout();
    // Accumulates d(sum_k dq_k Q_k)/d(theta) into grad. `acts` must hold a forward pass.
    void backward(std::span<const double> dq, std::span<double> grad,
                  const std::vector<std::vector<double>>& acts) const;
    void forward_cached(std::span<const double> input, std::vector<std::vector<double>>& acts) const;

    std::vector<std::size_t> widths_;
    std::vector<Layer> layers_;
    std::vector<double> params_;
    std::uint64_t seed_ = 0;
    std::uint64_t train_steps_ = 0;

    // Adam state, allocated on first use.
    std::vector<double> adam_m_;
    std::vector<double> adam_v_;
    std::uint64_t adam_t_ = 0;
};

/// Maximum relative error between backpropagated and central-difference gradients of
/// 0.5 * sum_k Q_k(input)^2 over all parameters. Requires eps in (0, 1e-2].
double gradient_check(const QNetwork& net, std::span<const double> input, double eps);

}  // namespace ephemix

#endif  // EPHEMIX_QNETWORK_HPP
