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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ephemix/errors.hpp"

namespace ephemix {
namespace {

TEST(QNetwork, StandardShape) {
    const auto net = QNetwork::standard(1);
    EXPECT_EQ(net.widths(), (std::vector<std::size_t>{6, 24, 24, 5}));
    EXPECT_EQ(net.parameters().size(), 6u * 24 + 24 + 24 * 24 + 24 + 24 * 5 + 5);
}

TEST(QNetwork, ZeroNetworkOutputsZero) {
    const auto net = QNetwork::zeros({6, 24, 24, 5});
    for (double v : net.forward(std::vector<double>{1, -2, 3, 0.5, 9, -1})) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(QNetwork, SinglePathProduct) {
    // Input (1,0) flows through hidden unit 0 only: out0 = 0.7 * 1.5.
    auto net = QNetwork::zeros({2, 2, 2});
    std::vector<double> p(net.parameters().size(), 0.0);
    p[0] = 1.5;  // W1[0][0]
    p[6] = 0.7;  // W2[0][0]
    net.set_parameters(p);
    const auto q = net.forward(std::vector<double>{1.0, 0.0});
    EXPECT_DOUBLE_EQ(q[0], 1.05);
    EXPECT_EQ(q[1], 0.0);
}

TEST(QNetwork, NegativePreActivationsAreCut) {
    auto net = QNetwork::zeros({1, 1, 1});
    net.set_parameters(std::vector<double>{-2.0, 0.0, 3.0, 0.25});
    EXPECT_EQ(net.forward(std::vector<double>{1.0})[0], 0.25);
    EXPECT_EQ(net.forward(std::vector<double>{-1.0})[0], 6.25);
}

TEST(QNetwork, ForwardValidatesInput) {
    const auto net = QNetwork::standard(1);
    EXPECT_THROW(net.forward(std::vector<double>{1.0}), std::invalid_argument);
    EXPECT_THROW(net.forward(std::vector<double>(6, std::nan(""))), std::invalid_argument);
    EXPECT_THROW(QNetwork({6}, 1), ValidationError);
    EXPECT_THROW(QNetwork({6, 0, 5}, 1), ValidationError);
}

TEST(TrainBatch, FixedPointLeavesWeightsAlone) {
    auto net = QNetwork::standard(3);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    const auto q = net.forward(x);
    const std::vector<double> before(net.parameters().begin(), net.parameters().end());
    const std::vector<int> actions{2};
    const double loss = net.train_batch(x, q, actions, TrainingConfig{});
    EXPECT_EQ(loss, 0.0);
    EXPECT_TRUE(std::equal(before.begin(), before.end(), net.parameters().begin()));
}

TEST(TrainBatch, LinearUnitSgdStep) {
    auto net = QNetwork::zeros({1, 1});
    const double w = 0.8, b = 0.1, x = 2.0, y = 1.0, lr = 0.01;
    net.set_parameters(std::vector<double>{w, b});
    TrainingConfig cfg;
    cfg.learning_rate = lr;
    const std::vector<double> in{x}, target{y};
    const std::vector<int> actions{0};
    const double loss = net.train_batch(in, target, actions, cfg);
    const double err = w * x + b - y;
    EXPECT_DOUBLE_EQ(loss, err * err);
    EXPECT_DOUBLE_EQ(net.parameters()[0], w - lr * 2.0 * err * x);
    EXPECT_DOUBLE_EQ(net.parameters()[1], b - lr * 2.0 * err);
}

TEST(TrainBatch, OnlyChosenActionContributes) {
    auto net = QNetwork::zeros({1, 2});
    net.set_parameters(std::vector<double>{1.0, 1.0, 0.0, 0.0});
    const std::vector<double> in{1.0};
    const std::vector<double> target{1.0, 50.0};  // action 1 target ignored
    const std::vector<int> actions{0};
    EXPECT_EQ(net.train_batch(in, target, actions, TrainingConfig{}), 0.0);
    const std::vector<int> bad{5};
    EXPECT_THROW(net.train_batch(in, target, bad, TrainingConfig{}), std::invalid_argument);
}

TEST(TrainBatch, BothOptimizersReduceLoss) {
    for (const auto opt : {Optimizer::Sgd, Optimizer::Adam}) {
        auto net = QNetwork::standard(11);
        TrainingConfig cfg;
        cfg.optimizer = opt;
        cfg.learning_rate = 0.01;
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> in(6 * 8), target(5 * 8);
        std::vector<int> actions(8);
        for (auto& v : in) v = u(rng);
        for (std::size_t s = 0; s < 8; ++s) {
            actions[s] = static_cast<int>(s % 5);
            target[s * 5 + s % 5] = 2.0 * in[s * 6] - 1.0;
        }
        const double first = net.train_batch(in, target, actions, cfg);
        double last = first;
        for (int i = 0; i < 3000; ++i) {
            last = net.train_batch(in, target, actions, cfg);
        }
        EXPECT_LT(last, 0.1 * first) << to_string(opt);
    }
}

TEST(GradientCheck, RandomNetworksAgreeWithFiniteDifferences) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto net = QNetwork::standard(seed);
        std::vector<double> x(6);
        for (auto& v : x) v = u(rng);
        EXPECT_LE(gradient_check(net, x, 1e-5), 1e-4) << "seed " << seed;
    }
}

TEST(GradientCheck, ZeroNetworkAndBadEps) {
    const auto net = QNetwork::zeros({6, 24, 24, 5});
    const std::vector<double> zero(6, 0.0);
    EXPECT_EQ(gradient_check(net, zero, 1e-5), 0.0);
    EXPECT_THROW(gradient_check(net, zero, 0.0), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsBitExact) {
    auto net = QNetwork::standard(4);
    TrainingConfig cfg;
    cfg.optimizer = Optimizer::Adam;
    const std::vector<double> in(6, 0.3), target(5, 1.0);
    const std::vector<int> actions{1};
    net.train_batch(in, target, actions, cfg);
    std::stringstream buf;
    net.save(buf);
    const auto back = QNetwork::load(buf);
    EXPECT_EQ(back.widths(), net.widths());
    EXPECT_TRUE(std::equal(net.parameters().begin(), net.parameters().end(), back.parameters().begin()));
    std::istringstream junk("not a network");
    EXPECT_THROW(QNetwork::load(junk), ParseError);
}

TEST(Optimizer, Names) {
    EXPECT_EQ(parse_optimizer("adam"), Optimizer::Adam);
    EXPECT_EQ(parse_optimizer("sgd"), Optimizer::Sgd);
    EXPECT_THROW(parse_optimizer("rmsprop"), ConfigError);
    TrainingConfig bad;
    bad.gamma = 1.0;
    EXPECT_THROW(validate(bad), ValidationError);
}

}  // namespace
}  // namespace ephemix
