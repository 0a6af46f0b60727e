#include <gtest/gtest.h>

#include "adast/nn/activation.hpp"
#include "adast/nn/batchnorm.hpp"
#include "adast/nn/conv1d.hpp"
#include "adast/nn/linear.hpp"
#include "adast/nn/loss.hpp"
#include "adast/nn/recurrent.hpp"
#include "test_support.hpp"

using namespace adast;
using namespace adast::nn;

namespace {

Tensor row(std::initializer_list<double> v) { return Tensor({1, 1, v.size()}, std::vector<double>(v)); }

}  // namespace

TEST(Conv1d, IdentityKernel) {
    const Tensor y = conv1d_forward(row({1, 2, 3}), Tensor({1, 1, 3}, {0, 1, 0}), Tensor({1}));
    EXPECT_EQ(y.values(), (std::vector<double>{1, 2, 3}));
}

TEST(Conv1d, ZeroKernelGivesZeros) {
    Rng rng(1);
    const Tensor x = test::random_tensor({2, 3, 5}, rng);
    const Tensor y = conv1d_forward(x, Tensor({4, 3, 3}), Tensor({4}));
    EXPECT_EQ(y.shape(), (Shape{2, 4, 5}));
    for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv1d, OnesKernelUsesZeroPadding) {
    const Tensor y = conv1d_forward(row({1, 2, 3}), Tensor({1, 1, 3}, {1, 1, 1}), Tensor({1}));
    EXPECT_EQ(y.values(), (std::vector<double>{3, 6, 5}));
}

TEST(Conv1d, PreservesLengthForAnyT) {
    Rng rng(2);
    for (std::size_t t = 1; t <= 12; ++t) {
        const Tensor x = test::random_tensor({2, 3, t}, rng);
        EXPECT_EQ(conv1d_forward(x, test::random_tensor({5, 3, 3}, rng), Tensor({5})).dim(2), t);
    }
}

TEST(Conv1d, MatchesPaddedSumOracle) {
    Rng rng(3);
    const Tensor x = test::random_tensor({2, 3, 6}, rng), w = test::random_tensor({4, 3, 3}, rng),
                 b = test::random_tensor({4}, rng);
    const Tensor y = conv1d_forward(x, w, b);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t o = 0; o < 4; ++o)
            for (std::size_t t = 0; t < 6; ++t) {
                double s = b[o];
                for (std::size_t c = 0; c < 3; ++c)
                    for (std::size_t k = 0; k < 3; ++k) {
                        const long src = static_cast<long>(t) + static_cast<long>(k) - 1;
                        if (src >= 0 && src < 6) s += w.at(o, c, k) * x.at(n, c, static_cast<std::size_t>(src));
                    }
                EXPECT_NEAR(y.at(n, o, t), s, 1e-14);
            }
}

TEST(Conv1d, ChannelMismatchThrows) {
    EXPECT_THROW(conv1d_forward(Tensor({1, 2, 4}), Tensor({1, 3, 3}), Tensor({1})), DimensionError);
    EXPECT_THROW(conv1d_forward(Tensor({1, 3, 4}), Tensor({1, 3, 2}), Tensor({1})), DimensionError);
}

TEST(BatchNorm, ConstantInputGivesZeros) {
    RunningStats stats(1);
    const Tensor y = batchnorm1d_forward(Tensor({2, 1, 4}, 3.0), Tensor({1}, 1.0), Tensor({1}), stats, Mode::train);
    for (double v : y.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(BatchNorm, HandComputedScaleShift) {
    RunningStats stats(1);
    const Tensor y = batchnorm1d_forward(row({-1, 1}), Tensor({1}, 2.0), Tensor({1}, 5.0), stats, Mode::train);
    const double k = 1.0 / std::sqrt(1.0 + 1e-5);
    EXPECT_NEAR(y[0], 5.0 - 2.0 * k, 1e-12);
    EXPECT_NEAR(y[1], 5.0 + 2.0 * k, 1e-12);
    // running stats: momentum 0.1, unbiased variance 2
    EXPECT_NEAR(stats.mean[0], 0.0, 1e-15);
    EXPECT_NEAR(stats.var[0], 0.9 * 1.0 + 0.1 * 2.0, 1e-15);
}

TEST(BatchNorm, TrainOutputMomentsAndEvalIdentity) {
    Rng rng(4);
    const Tensor x = test::random_tensor({4, 2, 8}, rng, -3, 5);
    RunningStats stats(2);
    const Tensor gamma = Tensor::vector({1.5, 0.5}), beta = Tensor::vector({-1.0, 2.0});
    const Tensor y = batchnorm1d_forward(x, gamma, beta, stats, Mode::train);
    for (std::size_t c = 0; c < 2; ++c) {
        double m = 0.0, v = 0.0;
        for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t t = 0; t < 8; ++t) m += y.at(b, c, t);
        m /= 32.0;
        for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t t = 0; t < 8; ++t) v += (y.at(b, c, t) - m) * (y.at(b, c, t) - m);
        v /= 32.0;
        EXPECT_NEAR(m, beta[c], 1e-10);
        EXPECT_NEAR(v, gamma[c] * gamma[c], 1e-3);
    }
    RunningStats fresh(2);
    const Tensor e = batchnorm1d_forward(x, Tensor({2}, 1.0), Tensor({2}), fresh, Mode::eval);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(e[i], x[i] / std::sqrt(1.0 + 1e-5), 1e-12);
}

TEST(BatchNorm, DegenerateBatchThrowsInTrainOnly) {
    RunningStats stats(1);
    EXPECT_THROW(batchnorm1d_forward(Tensor({1, 1, 1}), Tensor({1}, 1.0), Tensor({1}), stats, Mode::train),
                 DegenerateBatchError);
    EXPECT_NO_THROW(batchnorm1d_forward(Tensor({1, 1, 1}), Tensor({1}, 1.0), Tensor({1}), stats, Mode::eval));
}

TEST(Relu, ForwardAndSubgradient) {
    const Tensor x = Tensor::vector({-1, 0, 2});
    EXPECT_EQ(relu(x).values(), (std::vector<double>{0, 0, 2}));
    EXPECT_EQ(relu(Tensor::vector({-3, -0.5})).values(), (std::vector<double>{0, 0}));
    EXPECT_EQ(relu_backward(Tensor::vector({-1, 2}), Tensor::vector({1, 1})).values(), (std::vector<double>{0, 1}));
    EXPECT_EQ(relu_backward(Tensor::vector({0.0}), Tensor::vector({1.0}))[0], 0.0);
}

TEST(Dropout, IdentityCases) {
    Rng rng(5), data_rng(6);
    const Tensor x = test::random_tensor({3, 4, 5}, data_rng);
    EXPECT_EQ(dropout(x, 0.0, Mode::train, rng), x);
    EXPECT_EQ(dropout(x, 0.0, Mode::eval, rng), x);
    EXPECT_EQ(dropout(x, 0.5, Mode::eval, rng), x);
}

TEST(Dropout, InvertedScalingExpectation) {
    Rng rng(7);
    const Tensor y = dropout(Tensor({100000}, 1.0), 0.5, Mode::train, rng);
    const double mean = y.sum() / 100000.0;
    EXPECT_GE(mean, 0.97);
    EXPECT_LE(mean, 1.03);
    for (double v : y.values()) EXPECT_TRUE(v == 0.0 || v == 2.0);
}

TEST(Dropout, RejectsRateAtLeastOne) {
    Rng rng(1);
    EXPECT_THROW(dropout(Tensor({2}), 1.0, Mode::train, rng), ParameterError);
    EXPECT_THROW(dropout(Tensor({2}), -0.1, Mode::train, rng), ParameterError);
    EXPECT_THROW(Dropout(1.5), ParameterError);
}

TEST(Linear, IdentityAndHandExample) {
    Rng rng(8);
    const Tensor x = test::random_tensor({3, 3}, rng);
    Tensor eye({3, 3});
    for (std::size_t i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
    EXPECT_EQ(linear_forward(x, eye, Tensor({3})), x);
    const Tensor y = linear_forward(Tensor({1, 2}, {1, 2}), Tensor({2, 1}, {1, 1}), Tensor::vector({3}));
    EXPECT_EQ(y.values(), std::vector<double>{6});
}

TEST(Linear, MatchesDoubleLoopOracle) {
    Rng rng(9);
    const Tensor x = test::random_tensor({3, 4}, rng), w = test::random_tensor({4, 5}, rng),
                 b = test::random_tensor({5}, rng);
    const Tensor y = linear_forward(x, w, b);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double s = b[j];
            for (std::size_t k = 0; k < 4; ++k) s += x.at(i, k) * w.at(k, j);
            EXPECT_NEAR(y.at(i, j), s, 1e-14);
        }
    EXPECT_THROW(linear_forward(x, Tensor({3, 5}), b), DimensionError);
}

TEST(Lstm, ZeroWeightsGiveZeroStates) {
    Rng rng(10);
    LstmLayer layer(3, 4, rng);
    ParameterRefs ps;
    layer.collect(ps);
    for (Parameter* p : ps) p->value.fill(0.0);
    const Tensor h = layer.forward(test::random_tensor({2, 5, 3}, rng));
    for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, SingleStepScalarOracle) {
    Rng rng(11);
    LstmLayer layer(1, 1, rng);
    ParameterRefs ps;
    layer.collect(ps);
    // w_input [1,4], w_hidden [1,4], bias [4]; gate order i, f, g, o
    ps[0]->value = Tensor({1, 4}, {0.5, -0.3, 0.8, 0.2});
    ps[1]->value = Tensor({1, 4}, {0.1, 0.1, 0.1, 0.1});
    ps[2]->value = Tensor::vector({0.1, 1.0, -0.2, 0.05});
    const double x = 0.7;
    using nn::detail::sigmoid;
    const double i = sigmoid(0.5 * x + 0.1), g = std::tanh(0.8 * x - 0.2), o = sigmoid(0.2 * x + 0.05);
    const double c = i * g;  // c_prev = 0
    const double h = o * std::tanh(c);
    const Tensor out = layer.forward(Tensor({1, 1, 1}, {x}));
    EXPECT_NEAR(out[0], h, 1e-15);
}

TEST(Lstm, ForgetBiasInitAndInitBounds) {
    Rng rng(12);
    LstmLayer layer(3, 4, rng);
    ParameterRefs ps;
    layer.collect(ps);
    for (std::size_t j = 4; j < 8; ++j) EXPECT_EQ(ps[2]->value[j], 1.0);
    for (double v : ps[0]->value.values()) EXPECT_LE(std::abs(v), 0.5);
}

TEST(Lstm, LastStepMatchesFinalIndex) {
    Rng rng(13);
    Lstm lstm(3, 4, 2, 0.2, rng);
    const Tensor x = test::random_tensor({2, 6, 3}, rng);
    const RecurrentOutput out = lstm.forward(x, Mode::train, rng);
    ASSERT_EQ(out.h_all.shape(), (Shape{2, 6, 4}));
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(out.h_last.at(b, k), out.h_all.at(b, 5, k));
    EXPECT_THROW(lstm.forward(test::random_tensor({2, 6, 5}, rng), Mode::eval, rng), DimensionError);
}

TEST(Lstm, EvalModeIsDeterministic) {
    Rng rng(14), r1(1), r2(2);
    Lstm lstm(3, 4, 3, 0.5, rng);
    const Tensor x = test::random_tensor({2, 4, 3}, rng);
    EXPECT_EQ(lstm.forward(x, Mode::eval, r1).h_all, lstm.forward(x, Mode::eval, r2).h_all);
}

TEST(Gru, ShapesAndZeroWeights) {
    Rng rng(15);
    Gru gru(3, 5, 2, 0.0, rng);
    const RecurrentOutput out = gru.forward(test::random_tensor({2, 4, 3}, rng), Mode::eval, rng);
    EXPECT_EQ(out.h_all.shape(), (Shape{2, 4, 5}));
    EXPECT_EQ(out.h_last.shape(), (Shape{2, 5}));
    GruLayer layer(2, 3, rng);
    ParameterRefs ps;
    layer.collect(ps);
    for (Parameter* p : ps) p->value.fill(0.0);
    // z = 0.5, candidate tanh(0) = 0 -> h stays 0
    const Tensor h = layer.forward(test::random_tensor({1, 3, 2}, rng));
    for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(BiLstm, FinalStateJoinsBothDirections) {
    Rng rng(16);
    BiLstm bi(3, 4, 1, 0.0, rng);
    EXPECT_EQ(bi.output_size(), 8u);
    const Tensor x = test::random_tensor({2, 5, 3}, rng);
    const RecurrentOutput out = bi.forward(x, Mode::eval, rng);
    EXPECT_EQ(out.h_all.shape(), (Shape{2, 5, 8}));
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_EQ(out.h_last.at(b, k), out.h_all.at(b, 4, k));
            EXPECT_EQ(out.h_last.at(b, 4 + k), out.h_all.at(b, 0, 4 + k));
        }
}

TEST(Loss, CrossEntropyExamples) {
    const std::vector<int> l4{0};
    EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 4}), l4).value, std::log(4.0), 1e-12);
    const std::vector<int> l2{0};
    EXPECT_LT(softmax_cross_entropy(Tensor({1, 2}, {50.0, 0.0}), l2).value, 1e-20);
    EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 2}, {1.0, 2.0}), l2).value, std::log1p(std::exp(1.0)), 1e-12);
    EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 2}, {1.0, 2.0}), l2).value, 1.3133, 5e-5);
    // extreme logits stay finite
    const auto big = softmax_cross_entropy(Tensor({1, 2}, {1000.0, -1000.0}), std::vector<int>{1});
    EXPECT_NEAR(big.value, 2000.0, 1e-9);
    EXPECT_TRUE(big.grad.all_finite());
}

TEST(Loss, CrossEntropyGradientIsSoftmaxMinusOnehotOverB) {
    const Tensor logits({2, 3}, {0.1, 0.2, 0.3, 1.0, -1.0, 0.0});
    const std::vector<int> labels{2, 0};
    const auto r = softmax_cross_entropy(logits, labels);
    for (std::size_t b = 0; b < 2; ++b) {
        double z = 0.0;
        for (std::size_t k = 0; k < 3; ++k) z += std::exp(logits.at(b, k));
        for (std::size_t k = 0; k < 3; ++k) {
            const double p = std::exp(logits.at(b, k)) / z;
            const double expect = (p - (static_cast<int>(k) == labels[b] ? 1.0 : 0.0)) / 2.0;
            EXPECT_NEAR(r.grad.at(b, k), expect, 1e-15);
        }
    }
    EXPECT_THROW(softmax_cross_entropy(logits, std::vector<int>{3, 0}), LabelError);
    EXPECT_THROW(softmax_cross_entropy(logits, std::vector<int>{-1, 0}), LabelError);
    EXPECT_THROW(softmax_cross_entropy(logits, std::vector<int>{0}), DimensionError);
}

TEST(Loss, RmseExamples) {
    EXPECT_LE(rmse_loss(Tensor::vector({0.3, 0.7}), Tensor::vector({0.3, 0.7})).value, 1e-5);
    EXPECT_NEAR(rmse_loss(Tensor::vector({1, 1}), Tensor::vector({0, 0})).value, 1.0, 1e-12);
    EXPECT_NEAR(rmse_loss(Tensor::vector({1, 1, 1}), Tensor::vector({0, 1, 2})).value, std::sqrt(2.0 / 3.0), 1e-12);
    EXPECT_THROW(rmse_loss(Tensor::vector({1, 1}), Tensor::vector({1})), DimensionError);
    const auto zero = rmse_loss(Tensor::vector({0.5}), Tensor::vector({0.5}));
    EXPECT_TRUE(zero.grad.all_finite());
    EXPECT_EQ(zero.grad[0], 0.0);
}

TEST(Loss, RmseOfIdenticalRandomTensorsIsTiny) {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor a = test::random_tensor({3, 4}, rng, -100, 100);
        EXPECT_LE(rmse_loss(a, a).value, 1e-5);
    }
}

TEST(Parameter, ZeroGradIsExact) {
    Rng rng(18);
    Parameter p("w", test::random_tensor({2, 3}, rng));
    p.grad = test::random_tensor({2, 3}, rng);
    p.zero_grad();
    for (double v : p.grad.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(p.grad.shape(), p.value.shape());
}
