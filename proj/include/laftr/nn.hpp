#pragma once

// Dense feed-forward networks with hand-written backpropagation, the three
// elementary losses used by the trainer, and Adam.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace laftr::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Negative slope of every hidden leaky-rectifier unit.
inline constexpr double kLeakySlope = 0.2;
/// Probabilities are clamped into (kProbClamp, 1 - kProbClamp) before logs.
inline constexpr double kProbClamp = 1e-7;

enum class OutputActivation { Sigmoid, Identity };

const char* to_string(OutputActivation activation);

struct DenseLayer {
    Matrix weight;  // [out x in]
    Vector bias;    // [out]
};

/// Per-layer gradients shaped like the network's parameters, plus the
/// gradient with respect to the network input (needed to chain networks).
struct MlpGradients {
    std::vector<DenseLayer> layers;
    Matrix input;
};

/// Cached intermediate values of one forward pass.
struct ForwardTrace {
    std::vector<Matrix> layer_inputs;  // input fed to layer l
    std::vector<Matrix> pre_activations;
    Matrix output;
};

double sigmoid(double x);
double leaky_relu(double x);

class MlpNetwork {
public:
    MlpNetwork() = default;

    /// Glorot-uniform weights, zero biases. `widths` lists the input width
    /// followed by every layer's output width.
    MlpNetwork(const std::vector<std::size_t>& widths, OutputActivation output,
               std::mt19937_64& rng);

    /// Wraps explicit parameters; throws InputError if consecutive widths
    /// do not compose.
    MlpNetwork(std::vector<DenseLayer> layers, OutputActivation output);

    std::size_t input_width() const;
    std::size_t output_width() const;
    std::size_t layer_count() const { return layers_.size(); }
    std::size_t parameter_count() const;
    OutputActivation output_activation() const { return output_; }

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    Matrix forward(const Matrix& batch) const;
    ForwardTrace forward_trace(const Matrix& batch) const;

    /// Gradients of a scalar loss given dLoss/dOutput for the traced batch.
    MlpGradients backward(const ForwardTrace& trace, const Matrix& upstream) const;

    /// Parameters in layer order, weight (column-major) then bias.
    std::vector<double> flatten() const;
    void assign_flat(const std::vector<double>& values);

    std::uint64_t fingerprint() const;
    bool all_finite() const;

private:
    void check_shapes() const;

    std::vector<DenseLayer> layers_;
    OutputActivation output_ = OutputActivation::Identity;
};

std::vector<DenseLayer> zeros_like(const MlpNetwork& net);

struct AdamSettings {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators for one network. `label` prefixes the
/// parameter path reported when a gradient turns non-finite.
class AdamState {
public:
    AdamState() = default;
    AdamState(const MlpNetwork& net, AdamSettings settings, std::string label);

    std::uint64_t step_count() const { return step_; }
    const AdamSettings& settings() const { return settings_; }
    const std::vector<DenseLayer>& first_moment() const { return m_; }
    const std::vector<DenseLayer>& second_moment() const { return v_; }
    const std::string& label() const { return label_; }

private:
    friend void adam_step(MlpNetwork&, const std::vector<DenseLayer>&, AdamState&);

    AdamSettings settings_;
    std::string label_;
    std::vector<DenseLayer> m_;
    std::vector<DenseLayer> v_;
    std::uint64_t step_ = 0;
};

/// One bias-corrected Adam descent step. Throws NonFiniteError naming the
/// offending parameter if any gradient entry is NaN or infinite.
void adam_step(MlpNetwork& net, const std::vector<DenseLayer>& grads, AdamState& state);

enum class LossKind { CrossEntropy, AbsoluteError, SquaredError };

/// Mean elementwise loss over all entries.
double loss_value(LossKind kind, const Matrix& predictions, const Matrix& targets);

/// d loss_value / d predictions.
Matrix loss_gradient(LossKind kind, const Matrix& predictions, const Matrix& targets);

}  // namespace laftr::nn
