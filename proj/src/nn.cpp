#include "laftr/nn.hpp"

#include "laftr/errors.hpp"
#include "laftr/fingerprint.hpp"

#include <algorithm>
#include <cmath>

namespace laftr::nn {

const char* to_string(OutputActivation activation) {
    return activation == OutputActivation::Sigmoid ? "sigmoid" : "identity";
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double leaky_relu(double x) { return x > 0.0 ? x : kLeakySlope * x; }

MlpNetwork::MlpNetwork(const std::vector<std::size_t>& widths, OutputActivation output,
                       std::mt19937_64& rng)
    : output_(output) {
    if (widths.size() < 2) {
        throw InputError("network needs an input width and at least one layer");
    }
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(widths[l]);
        const auto out = static_cast<Eigen::Index>(widths[l + 1]);
        if (in == 0 || out == 0) {
            throw InputError("network layer widths must be positive");
        }
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
        for (Eigen::Index c = 0; c < in; ++c) {
            for (Eigen::Index r = 0; r < out; ++r) {
                layer.weight(r, c) = dist(rng);
            }
        }
        layers_.push_back(std::move(layer));
    }
}

MlpNetwork::MlpNetwork(std::vector<DenseLayer> layers, OutputActivation output)
    : layers_(std::move(layers)), output_(output) {
    check_shapes();
}

void MlpNetwork::check_shapes() const {
    if (layers_.empty()) {
        throw InputError("network has no layers");
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.bias.size() != layer.weight.rows()) {
            throw InputError("layer " + std::to_string(l) + ": bias length does not match weight rows");
        }
        if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
            throw InputError("layer " + std::to_string(l) + ": input width " +
                             std::to_string(layer.weight.cols()) + " does not match previous output width " +
                             std::to_string(layers_[l - 1].weight.rows()));
        }
    }
}

std::size_t MlpNetwork::input_width() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t MlpNetwork::output_width() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers_) {
        count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    }
    return count;
}

Matrix MlpNetwork::forward(const Matrix& batch) const { return forward_trace(batch).output; }

ForwardTrace MlpNetwork::forward_trace(const Matrix& batch) const {
    if (layers_.empty()) {
        throw InputError("forward on an empty network");
    }
    if (static_cast<std::size_t>(batch.cols()) != input_width()) {
        throw InputError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                         std::to_string(input_width()));
    }
    ForwardTrace trace;
    trace.layer_inputs.reserve(layers_.size());
    trace.pre_activations.reserve(layers_.size());
    Matrix current = batch;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        Matrix pre = current * layer.weight.transpose();
        pre.rowwise() += layer.bias.transpose();
        trace.layer_inputs.push_back(std::move(current));
        const bool last = l + 1 == layers_.size();
        if (!last) {
            current = pre.unaryExpr(&leaky_relu);
        } else if (output_ == OutputActivation::Sigmoid) {
            current = pre.unaryExpr(&sigmoid);
        } else {
            current = pre;
        }
        trace.pre_activations.push_back(std::move(pre));
    }
    trace.output = std::move(current);
    return trace;
}

MlpGradients MlpNetwork::backward(const ForwardTrace& trace, const Matrix& upstream) const {
    if (trace.layer_inputs.size() != layers_.size() || trace.pre_activations.size() != layers_.size()) {
        throw InternalStateError("forward trace does not belong to this network");
    }
    if (upstream.rows() != trace.output.rows() || upstream.cols() != trace.output.cols()) {
        throw InternalStateError("upstream gradient shape does not match cached output");
    }
    MlpGradients grads;
    grads.layers.resize(layers_.size());

    Matrix delta = upstream;
    if (output_ == OutputActivation::Sigmoid) {
        delta = delta.cwiseProduct(trace.output.unaryExpr([](double s) { return s * (1.0 - s); }));
    }
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& input = trace.layer_inputs[l];
        if (input.cols() != layers_[l].weight.cols() || input.rows() != delta.rows()) {
            throw InternalStateError("cached activations for layer " + std::to_string(l) +
                                     " do not match the network");
        }
        grads.layers[l].weight = delta.transpose() * input;
        grads.layers[l].bias = delta.colwise().sum().transpose();
        Matrix back = delta * layers_[l].weight;
        if (l > 0) {
            const auto& pre = trace.pre_activations[l - 1];
            back = back.cwiseProduct(pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : kLeakySlope; }));
        }
        delta = std::move(back);
    }
    grads.input = std::move(delta);
    return grads;
}

std::vector<double> MlpNetwork::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& layer : layers_) {
        out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
        out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    }
    return out;
}

void MlpNetwork::assign_flat(const std::vector<double>& values) {
    if (values.size() != parameter_count()) {
        throw InputError("flat parameter vector has " + std::to_string(values.size()) + " entries, expected " +
                         std::to_string(parameter_count()));
    }
    std::size_t offset = 0;
    for (auto& layer : layers_) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), layer.weight.size(), layer.weight.data());
        offset += static_cast<std::size_t>(layer.weight.size());
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), layer.bias.size(), layer.bias.data());
        offset += static_cast<std::size_t>(layer.bias.size());
    }
}

std::uint64_t MlpNetwork::fingerprint() const {
    Fnv1a h;
    for (const auto& layer : layers_) {
        h.update(static_cast<std::uint64_t>(layer.weight.rows()));
        h.update(static_cast<std::uint64_t>(layer.weight.cols()));
        h.update(std::span<const double>(layer.weight.data(), static_cast<std::size_t>(layer.weight.size())));
        h.update(std::span<const double>(layer.bias.data(), static_cast<std::size_t>(layer.bias.size())));
    }
    h.update(static_cast<std::uint64_t>(output_));
    return h.digest();
}

bool MlpNetwork::all_finite() const {
    return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& layer) {
        return layer.weight.allFinite() && layer.bias.allFinite();
    });
}

std::vector<DenseLayer> zeros_like(const MlpNetwork& net) {
    std::vector<DenseLayer> out;
    out.reserve(net.layer_count());
    for (const auto& layer : net.layers()) {
        out.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()), Vector::Zero(layer.bias.size())});
    }
    return out;
}

AdamState::AdamState(const MlpNetwork& net, AdamSettings settings, std::string label)
    : settings_(settings), label_(std::move(label)), m_(zeros_like(net)), v_(zeros_like(net)) {}

namespace {

void check_finite(const Matrix& grad, const std::string& path) {
    for (Eigen::Index c = 0; c < grad.cols(); ++c) {
        for (Eigen::Index r = 0; r < grad.rows(); ++r) {
            if (!std::isfinite(grad(r, c))) {
                const std::string where = path + "[" + std::to_string(r) + "," + std::to_string(c) + "]";
                throw NonFiniteError(where, "non-finite gradient at " + where);
            }
        }
    }
}

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& param, const Grad& grad, Moment& m, Moment& v, const AdamSettings& s,
                 double correction1, double correction2) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + s.epsilon);
}

}  // namespace

void adam_step(MlpNetwork& net, const std::vector<DenseLayer>& grads, AdamState& state) {
    auto& layers = net.layers();
    if (grads.size() != layers.size() || state.m_.size() != layers.size()) {
        throw InputError("adam: parameter, gradient and moment layer counts differ");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& p = layers[l];
        const auto& g = grads[l];
        const auto& m = state.m_[l];
        if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
            g.bias.size() != p.bias.size() || m.weight.rows() != p.weight.rows() ||
            m.weight.cols() != p.weight.cols() || m.bias.size() != p.bias.size()) {
            throw InputError("adam: shape mismatch at layer " + std::to_string(l));
        }
        const std::string prefix = state.label_ + ".layer" + std::to_string(l);
        check_finite(g.weight, prefix + ".weight");
        check_finite(g.bias, prefix + ".bias");
    }
    ++state.step_;
    const auto& s = state.settings_;
    const double t = static_cast<double>(state.step_);
    const double correction1 = 1.0 - std::pow(s.beta1, t);
    const double correction2 = 1.0 - std::pow(s.beta2, t);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        adam_update(layers[l].weight, grads[l].weight, state.m_[l].weight, state.v_[l].weight, s,
                    correction1, correction2);
        adam_update(layers[l].bias, grads[l].bias, state.m_[l].bias, state.v_[l].bias, s, correction1,
                    correction2);
    }
}

namespace {

void check_loss_shapes(const Matrix& predictions, const Matrix& targets) {
    if (predictions.size() == 0) {
        throw InputError("loss on an empty batch");
    }
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
        throw InputError("loss: predictions and targets differ in shape");
    }
}

double clamp_probability(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

double loss_value(LossKind kind, const Matrix& predictions, const Matrix& targets) {
    check_loss_shapes(predictions, targets);
    const auto n = static_cast<double>(predictions.size());
    switch (kind) {
        case LossKind::CrossEntropy: {
            double total = 0.0;
            for (Eigen::Index i = 0; i < predictions.size(); ++i) {
                const double p = clamp_probability(predictions.data()[i]);
                const double t = targets.data()[i];
                total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
            }
            return total / n;
        }
        case LossKind::AbsoluteError:
            return (predictions - targets).cwiseAbs().sum() / n;
        case LossKind::SquaredError:
            return (predictions - targets).squaredNorm() / n;
    }
    return 0.0;
}

Matrix loss_gradient(LossKind kind, const Matrix& predictions, const Matrix& targets) {
    check_loss_shapes(predictions, targets);
    const auto n = static_cast<double>(predictions.size());
    Matrix grad(predictions.rows(), predictions.cols());
    switch (kind) {
        case LossKind::CrossEntropy:
            for (Eigen::Index i = 0; i < predictions.size(); ++i) {
                const double raw = predictions.data()[i];
                const double t = targets.data()[i];
                // Zero slope where the clamp is active.
                if (raw <= kProbClamp || raw >= 1.0 - kProbClamp) {
                    grad.data()[i] = 0.0;
                } else {
                    grad.data()[i] = (-t / raw + (1.0 - t) / (1.0 - raw)) / n;
                }
            }
            break;
        case LossKind::AbsoluteError:
            for (Eigen::Index i = 0; i < predictions.size(); ++i) {
                const double diff = predictions.data()[i] - targets.data()[i];
                grad.data()[i] = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) / n;
            }
            break;
        case LossKind::SquaredError:
            grad = 2.0 * (predictions - targets) / n;
            break;
    }
    return grad;
}

}  // namespace laftr::nn
