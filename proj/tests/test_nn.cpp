#include "laftr/errors.hpp"
#include "laftr/nn.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace laftr;
using namespace laftr::nn;
using test_support::random_matrix;

namespace {

MlpNetwork two_layer(std::size_t in, std::size_t hidden, std::size_t out, OutputActivation act, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto net = MlpNetwork({in, hidden, out}, act, rng);
    // Non-zero biases so their gradients are exercised.
    std::normal_distribution<double> normal(0.0, 0.3);
    for (auto& layer : net.layers()) {
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
            layer.bias(i) = normal(rng);
        }
    }
    return net;
}

// Evaluates every neuron with explicit scalar loops.
Matrix scalar_forward(const MlpNetwork& net, const Matrix& x) {
    Matrix current = x;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& layer = net.layers()[l];
        Matrix next(current.rows(), layer.weight.rows());
        for (Eigen::Index n = 0; n < current.rows(); ++n) {
            for (Eigen::Index o = 0; o < layer.weight.rows(); ++o) {
                double s = layer.bias(o);
                for (Eigen::Index i = 0; i < layer.weight.cols(); ++i) {
                    s += layer.weight(o, i) * current(n, i);
                }
                const bool last = l + 1 == net.layer_count();
                if (!last) {
                    s = s > 0 ? s : 0.2 * s;
                } else if (net.output_activation() == OutputActivation::Sigmoid) {
                    s = 1.0 / (1.0 + std::exp(-s));
                }
                next(n, o) = s;
            }
        }
        current = next;
    }
    return current;
}

bool near_kink(const MlpNetwork& net, const Matrix& x, double margin) {
    const auto trace = net.forward_trace(x);
    for (std::size_t l = 0; l + 1 < trace.pre_activations.size(); ++l) {
        if ((trace.pre_activations[l].array().abs() < margin).any()) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("sigmoid of a zero network is one half") {
    std::vector<DenseLayer> layers{{Matrix::Zero(3, 4), Vector::Zero(3)}, {Matrix::Zero(1, 3), Vector::Zero(1)}};
    MlpNetwork net(layers, OutputActivation::Sigmoid);
    std::mt19937_64 rng(1);
    const auto out = net.forward(random_matrix(5, 4, rng));
    CHECK((out.array() == 0.5).all());
}

TEST_CASE("identity single-layer net passes its input through") {
    MlpNetwork net({{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)}}, OutputActivation::Identity);
    CHECK(net.forward(Matrix::Constant(1, 1, 3.0))(0, 0) == 3.0);
}

TEST_CASE("forward matches a per-neuron scalar evaluation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto net = two_layer(4, 6, 2, seed % 2 ? OutputActivation::Sigmoid : OutputActivation::Identity, seed);
        std::mt19937_64 rng(seed + 100);
        const Matrix x = random_matrix(7, 4, rng);
        const Matrix expected = scalar_forward(net, x);
        const Matrix got = net.forward(x);
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("forward rejects a column mismatch") {
    const auto net = two_layer(4, 3, 1, OutputActivation::Sigmoid, 0);
    CHECK_THROWS_AS(net.forward(Matrix::Zero(2, 5)), InputError);
}

TEST_CASE("explicit layers must compose") {
    std::vector<DenseLayer> bad{{Matrix::Zero(3, 4), Vector::Zero(3)}, {Matrix::Zero(1, 2), Vector::Zero(1)}};
    CHECK_THROWS_AS(MlpNetwork(bad, OutputActivation::Identity), InputError);
}

TEST_CASE("glorot initialization stays within its bound and biases start at zero") {
    std::mt19937_64 rng(3);
    MlpNetwork net({10, 6, 1}, OutputActivation::Sigmoid, rng);
    for (const auto& layer : net.layers()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
        CHECK(layer.weight.cwiseAbs().maxCoeff() <= bound);
        CHECK(layer.bias.isZero());
    }
}

TEST_CASE("sigmoid outputs stay strictly inside (0, 1)") {
    std::mt19937_64 rng(4);
    MlpNetwork net({3, 4, 1}, OutputActivation::Sigmoid, rng);
    const auto out = net.forward(random_matrix(50, 3, rng, 5.0));
    CHECK((out.array() > 0.0).all());
    CHECK((out.array() < 1.0).all());
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
    const auto net = two_layer(3, 4, 2, OutputActivation::Identity, 5);
    std::mt19937_64 rng(5);
    const auto trace = net.forward_trace(random_matrix(6, 3, rng));
    const auto grads = net.backward(trace, Matrix::Zero(6, 2));
    for (const auto& g : grads.layers) {
        CHECK(g.weight.isZero());
        CHECK(g.bias.isZero());
    }
}

TEST_CASE("single linear neuron with squared error has the closed-form gradient") {
    MlpNetwork net({{Matrix::Constant(1, 2, 0.5), Vector::Constant(1, 0.1)}}, OutputActivation::Identity);
    Matrix x(1, 2);
    x << 2.0, -1.0;
    const Matrix target = Matrix::Constant(1, 1, 1.5);
    const auto trace = net.forward_trace(x);
    const double pred = trace.output(0, 0);
    const auto grads = net.backward(trace, loss_gradient(LossKind::SquaredError, trace.output, target));
    CHECK(grads.layers[0].weight(0, 0) == doctest::Approx(2.0 * (pred - 1.5) * 2.0).epsilon(1e-14));
    CHECK(grads.layers[0].weight(0, 1) == doctest::Approx(2.0 * (pred - 1.5) * -1.0).epsilon(1e-14));
    CHECK(grads.layers[0].bias(0) == doctest::Approx(2.0 * (pred - 1.5)).epsilon(1e-14));
}

TEST_CASE("backward rejects a trace from a different shape") {
    const auto net = two_layer(3, 4, 1, OutputActivation::Sigmoid, 6);
    const auto other = two_layer(3, 5, 1, OutputActivation::Sigmoid, 6);
    std::mt19937_64 rng(6);
    const auto trace = other.forward_trace(random_matrix(2, 3, rng));
    CHECK_THROWS_AS(net.backward(trace, Matrix::Zero(2, 1)), InternalStateError);
}

TEST_CASE("backprop matches central finite differences for every loss kind") {
    const LossKind kinds[] = {LossKind::CrossEntropy, LossKind::SquaredError, LossKind::AbsoluteError};
    std::size_t checked_draws = 0;
    for (std::uint64_t draw = 0; draw < 120; ++draw) {
        const LossKind kind = kinds[draw % 3];
        const auto act = kind == LossKind::CrossEntropy ? OutputActivation::Sigmoid : OutputActivation::Identity;
        auto net = two_layer(3, 5, kind == LossKind::CrossEntropy ? 1 : 2, act, draw);
        std::mt19937_64 rng(draw + 1000);
        const Matrix x = random_matrix(4, 3, rng);
        Matrix target(4, net.output_width());
        if (kind == LossKind::CrossEntropy) {
            const auto bits = test_support::random_bits(4, rng);
            for (int i = 0; i < 4; ++i) {
                target(i, 0) = bits[static_cast<std::size_t>(i)];
            }
        } else {
            target = random_matrix(4, static_cast<Eigen::Index>(net.output_width()), rng);
        }
        if (near_kink(net, x, 1e-3)) {
            continue;
        }
        if (kind == LossKind::AbsoluteError && ((net.forward(x) - target).array().abs() < 1e-3).any()) {
            continue;
        }
        const auto trace = net.forward_trace(x);
        const auto grads = net.backward(trace, loss_gradient(kind, trace.output, target));
        std::vector<double> analytic;
        for (const auto& g : grads.layers) {
            analytic.insert(analytic.end(), g.weight.data(), g.weight.data() + g.weight.size());
            analytic.insert(analytic.end(), g.bias.data(), g.bias.data() + g.bias.size());
        }
        const auto theta = net.flatten();
        REQUIRE(analytic.size() == theta.size());
        auto probe = net;
        const auto f = [&](const std::vector<double>& p) {
            probe.assign_flat(p);
            return loss_value(kind, probe.forward(x), target);
        };
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double numeric = test_support::central_difference(f, theta, i);
            INFO("draw " << draw << " parameter " << i);
            CHECK(test_support::gradient_close(analytic[i], numeric));
        }
        ++checked_draws;
    }
    CHECK(checked_draws >= 100);
}

TEST_CASE("loss values") {
    const Matrix half = Matrix::Constant(1, 1, 0.5);
    const Matrix one = Matrix::Constant(1, 1, 1.0);
    CHECK(loss_value(LossKind::CrossEntropy, half, one) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    std::mt19937_64 rng(9);
    const Matrix p = random_matrix(6, 3, rng);
    CHECK(loss_value(LossKind::AbsoluteError, p, p) == 0.0);
    const Matrix t = random_matrix(6, 3, rng);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            sum += (p(i, j) - t(i, j)) * (p(i, j) - t(i, j));
        }
    }
    CHECK(loss_value(LossKind::SquaredError, p, t) == doctest::Approx(sum / 18.0).epsilon(1e-14));
    CHECK_THROWS_AS(loss_value(LossKind::SquaredError, Matrix(0, 1), Matrix(0, 1)), InputError);
}

TEST_CASE("clamped cross-entropy stays finite at saturated outputs") {
    Matrix p(2, 1);
    p << 0.0, 1.0;
    Matrix t(2, 1);
    t << 1.0, 0.0;
    const double loss = loss_value(LossKind::CrossEntropy, p, t);
    CHECK(std::isfinite(loss));
    CHECK(loss_gradient(LossKind::CrossEntropy, p, t).allFinite());
}

TEST_CASE("adam: zero gradients leave parameters and moments untouched") {
    auto net = two_layer(2, 3, 1, OutputActivation::Sigmoid, 11);
    const auto before = net.flatten();
    AdamState state(net, {}, "net");
    adam_step(net, zeros_like(net), state);
    CHECK(net.flatten() == before);
    CHECK(state.step_count() == 1);
    for (const auto& m : state.first_moment()) {
        CHECK(m.weight.isZero());
    }
    for (const auto& v : state.second_moment()) {
        CHECK(v.weight.isZero());
    }
}

TEST_CASE("adam: a constant gradient moves each step by about the learning rate") {
    MlpNetwork net({{Matrix::Constant(1, 1, 0.0), Vector::Zero(1)}}, OutputActivation::Identity);
    AdamState state(net, {}, "scalar");
    std::vector<DenseLayer> g{{Matrix::Constant(1, 1, 3.0), Vector::Zero(1)}};
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
        adam_step(net, g, state);
    }
    prev = net.layers()[0].weight(0, 0);
    adam_step(net, g, state);
    CHECK(prev - net.layers()[0].weight(0, 0) == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("adam: three scalar steps follow the recurrence") {
    const AdamSettings s{};
    MlpNetwork net({{Matrix::Constant(1, 1, 0.7), Vector::Zero(1)}}, OutputActivation::Identity);
    AdamState state(net, s, "scalar");
    double theta = 0.7;
    double m = 0.0;
    double v = 0.0;
    const double grads[] = {1.0, -1.0, 2.0};
    for (int t = 1; t <= 3; ++t) {
        const double g = grads[t - 1];
        m = s.beta1 * m + (1 - s.beta1) * g;
        v = s.beta2 * v + (1 - s.beta2) * g * g;
        const double mhat = m / (1 - std::pow(s.beta1, t));
        const double vhat = v / (1 - std::pow(s.beta2, t));
        theta -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
        adam_step(net, {{Matrix::Constant(1, 1, g), Vector::Zero(1)}}, state);
        CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(theta).epsilon(1e-15));
    }
    CHECK(state.step_count() == 3);
}

TEST_CASE("adam: a non-finite gradient names the parameter") {
    auto net = two_layer(2, 3, 1, OutputActivation::Sigmoid, 12);
    AdamState state(net, {}, "encoder");
    auto g = zeros_like(net);
    g[1].weight(0, 2) = std::nan("");
    const auto before = net.flatten();
    try {
        adam_step(net, g, state);
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        CHECK(e.where() == "encoder.layer1.weight[0,2]");
    }
    CHECK(net.flatten() == before);
}

TEST_CASE("adam rejects mismatched gradient shapes") {
    auto net = two_layer(2, 3, 1, OutputActivation::Sigmoid, 13);
    AdamState state(net, {}, "net");
    const auto other = two_layer(2, 4, 1, OutputActivation::Sigmoid, 13);
    CHECK_THROWS_AS(adam_step(net, zeros_like(other), state), InputError);
}

TEST_CASE("identical seeds give bit-identical networks") {
    std::mt19937_64 a(42);
    std::mt19937_64 b(42);
    MlpNetwork n1({5, 4, 2}, OutputActivation::Identity, a);
    MlpNetwork n2({5, 4, 2}, OutputActivation::Identity, b);
    CHECK(n1.flatten() == n2.flatten());
    CHECK(n1.fingerprint() == n2.fingerprint());
}
