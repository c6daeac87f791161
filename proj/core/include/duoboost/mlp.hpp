#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duoboost/matrix.hpp"

namespace duoboost {

enum class OptimizerKind { sgd, rmsprop };

OptimizerKind optimizer_from_string(const std::string& name);
std::string to_string(OptimizerKind k);

struct MlpConfig {
    std::vector<int> hidden_sizes;   // empty = single linear layer
    int epochs = 5;
    int batch_size = 32;
    double learning_rate = 0.01;
    OptimizerKind optimizer = OptimizerKind::rmsprop;
    double rms_decay = 0.9;
    double rms_stabilizer = 1e-8;
    std::uint64_t seed = 0;
};

struct DenseLayer {
    Matrix weights;  // out x in
    Vec bias;        // out

    bool operator==(const DenseLayer&) const = default;
};

// --- dense-stack primitives shared by Mlp and the fusion networks ---

/// Random init: weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero bias.
std::vector<DenseLayer> init_stack(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Forward pass; activations[0] is the input, activations.back() the output.
/// final_linear leaves the last layer unrectified; all other layers apply
/// the rectifier.
std::vector<Matrix> stack_forward(const std::vector<DenseLayer>& layers, Matrix input,
                                  bool final_linear);

/// Backward pass from dL/d(output); returns per-layer gradients and, when
/// input_delta is non-null, dL/d(input).
std::vector<DenseLayer> stack_backward(const std::vector<DenseLayer>& layers,
                                       const std::vector<Matrix>& activations, Matrix delta,
                                       bool final_linear, Matrix* input_delta);

/// One optimizer step. rms_state is created on first use and carried across
/// calls; ignored for plain sgd.
void apply_gradient_update(std::vector<DenseLayer>& layers, const std::vector<DenseLayer>& grads,
                           std::vector<DenseLayer>& rms_state, OptimizerKind kind,
                           double learning_rate, double rms_decay, double rms_stabilizer);

/// Fully connected network: rectifier on hidden layers, identity output,
/// trained on mean squared error by mini-batch gradient descent.
/// Shuffle order and init are fixed by the seed.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers);

    /// Random init for the given layer sizes (input, hidden..., output).
    static Mlp init(const std::vector<int>& layer_sizes, std::uint64_t seed);

    /// Fit to vector targets. warm_start, when given, supplies the initial
    /// weights instead of a fresh init. Throws if the training loss goes
    /// non-finite, naming the epoch.
    static Mlp fit(const Matrix& features, const Matrix& targets, const MlpConfig& config,
                   const Mlp* warm_start = nullptr);

    Matrix predict(const Matrix& features) const;
    Vec predict_one(std::span<const double> x) const;

    /// Mean squared error per component: sum ||pred - target||^2 / (n * out_dim).
    double mse(const Matrix& features, const Matrix& targets) const;

    /// Gradients of mse() with respect to every weight and bias.
    std::vector<DenseLayer> gradients(const Matrix& features, const Matrix& targets) const;

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    int input_dim() const;
    int output_dim() const;

    bool operator==(const Mlp&) const = default;

private:
    std::vector<DenseLayer> layers_;
};

} // namespace duoboost
