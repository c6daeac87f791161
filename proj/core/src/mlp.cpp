#include "duoboost/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "duoboost/rng.hpp"

namespace duoboost {

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::sgd ? "sgd" : "rmsprop";
}

std::vector<DenseLayer> init_stack(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("init_stack: need input and output sizes");
    Rng rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        if (fan_in < 1 || fan_out < 1) throw std::invalid_argument("init_stack: non-positive layer size");
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-scale, scale);
        DenseLayer layer;
        layer.weights = Matrix(fan_out, fan_in);
        layer.bias.assign(fan_out, 0.0);
        for (auto& w : layer.weights.data()) w = u(rng);
        layers.push_back(std::move(layer));
    }
    return layers;
}

std::vector<Matrix> stack_forward(const std::vector<DenseLayer>& layers, Matrix input,
                                  bool final_linear) {
    std::vector<Matrix> activations;
    activations.push_back(std::move(input));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const Matrix& prev = activations.back();
        const bool rectify = !(final_linear && l + 1 == layers.size());
        Matrix out(prev.rows(), layer.bias.size());
        for (std::size_t b = 0; b < prev.rows(); ++b) {
            for (std::size_t o = 0; o < layer.bias.size(); ++o) {
                double z = layer.bias[o];
                for (std::size_t i = 0; i < prev.cols(); ++i) z += layer.weights(o, i) * prev(b, i);
                out(b, o) = rectify && z < 0.0 ? 0.0 : z;
            }
        }
        activations.push_back(std::move(out));
    }
    return activations;
}

std::vector<DenseLayer> stack_backward(const std::vector<DenseLayer>& layers,
                                       const std::vector<Matrix>& activations, Matrix delta,
                                       bool final_linear, Matrix* input_delta) {
    std::vector<DenseLayer> grads(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const Matrix& input = activations[l];
        const Matrix& output = activations[l + 1];
        const bool rectified = !(final_linear && l + 1 == layers.size());
        if (rectified) {
            // rectifier derivative: pass-through where the unit is active
            for (std::size_t b = 0; b < delta.rows(); ++b)
                for (std::size_t o = 0; o < delta.cols(); ++o)
                    if (output(b, o) <= 0.0) delta(b, o) = 0.0;
        }
        grads[l].weights = Matrix(layers[l].weights.rows(), layers[l].weights.cols());
        grads[l].bias.assign(layers[l].bias.size(), 0.0);
        for (std::size_t b = 0; b < delta.rows(); ++b) {
            for (std::size_t o = 0; o < delta.cols(); ++o) {
                const double d = delta(b, o);
                grads[l].bias[o] += d;
                for (std::size_t i = 0; i < input.cols(); ++i)
                    grads[l].weights(o, i) += d * input(b, i);
            }
        }
        if (l > 0 || input_delta) {
            Matrix prev_delta(delta.rows(), input.cols());
            for (std::size_t b = 0; b < delta.rows(); ++b)
                for (std::size_t i = 0; i < input.cols(); ++i) {
                    double s = 0.0;
                    for (std::size_t o = 0; o < delta.cols(); ++o)
                        s += layers[l].weights(o, i) * delta(b, o);
                    prev_delta(b, i) = s;
                }
            delta = std::move(prev_delta);
        }
    }
    if (input_delta) *input_delta = std::move(delta);
    return grads;
}

void apply_gradient_update(std::vector<DenseLayer>& layers, const std::vector<DenseLayer>& grads,
                           std::vector<DenseLayer>& rms_state, OptimizerKind kind,
                           double learning_rate, double rms_decay, double rms_stabilizer) {
    if (kind == OptimizerKind::rmsprop && rms_state.empty()) {
        rms_state.resize(layers.size());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            rms_state[l].weights = Matrix(layers[l].weights.rows(), layers[l].weights.cols());
            rms_state[l].bias.assign(layers[l].bias.size(), 0.0);
        }
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = layers[l].weights.data();
        const auto& gw = grads[l].weights.data();
        auto& b = layers[l].bias;
        const auto& gb = grads[l].bias;
        if (kind == OptimizerKind::sgd) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * gw[i];
            for (std::size_t i = 0; i < b.size(); ++i) b[i] -= learning_rate * gb[i];
        } else {
            auto& aw = rms_state[l].weights.data();
            auto& ab = rms_state[l].bias;
            for (std::size_t i = 0; i < w.size(); ++i) {
                aw[i] = rms_decay * aw[i] + (1.0 - rms_decay) * gw[i] * gw[i];
                w[i] -= learning_rate * gw[i] / (std::sqrt(aw[i]) + rms_stabilizer);
            }
            for (std::size_t i = 0; i < b.size(); ++i) {
                ab[i] = rms_decay * ab[i] + (1.0 - rms_decay) * gb[i] * gb[i];
                b[i] -= learning_rate * gb[i] / (std::sqrt(ab[i]) + rms_stabilizer);
            }
        }
    }
}

namespace {

Matrix gather_rows(const Matrix& features, const std::vector<int>& batch) {
    Matrix out(batch.size(), features.cols());
    for (std::size_t b = 0; b < batch.size(); ++b)
        for (std::size_t c = 0; c < features.cols(); ++c) out(b, c) = features(batch[b], c);
    return out;
}

} // namespace

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

Mlp Mlp::init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    return Mlp(init_stack(layer_sizes, seed));
}

Mlp Mlp::fit(const Matrix& features, const Matrix& targets, const MlpConfig& config,
             const Mlp* warm_start) {
    if (features.rows() == 0) throw std::invalid_argument("Mlp::fit: empty input");
    if (features.rows() != targets.rows())
        throw std::invalid_argument("Mlp::fit: feature/target count mismatch");
    if (config.epochs < 1) throw std::invalid_argument("Mlp::fit: epochs must be >= 1");

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(features.cols()));
    for (int h : config.hidden_sizes) sizes.push_back(h);
    sizes.push_back(static_cast<int>(targets.cols()));

    Mlp net = warm_start ? *warm_start : Mlp::init(sizes, mix_seed(config.seed, 0x1717));
    if (net.input_dim() != static_cast<int>(features.cols()) ||
        net.output_dim() != static_cast<int>(targets.cols()))
        throw std::invalid_argument("Mlp::fit: warm start dimensions do not match data");

    std::vector<DenseLayer> rms_state;
    const int n = static_cast<int>(features.rows());
    const int batch_size = std::max(1, std::min(config.batch_size, n));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(config.seed, 0x5151));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += batch_size) {
            const int end = std::min(start + batch_size, n);
            const std::vector<int> batch(order.begin() + start, order.begin() + end);
            auto activations = stack_forward(net.layers_, gather_rows(features, batch), true);
            const Matrix& out = activations.back();
            // d(mse)/d(out) with mse averaged over batch and components
            Matrix delta(out.rows(), out.cols());
            const double norm = static_cast<double>(out.rows() * out.cols());
            for (std::size_t b = 0; b < out.rows(); ++b)
                for (std::size_t c = 0; c < out.cols(); ++c) {
                    const double diff = out(b, c) - targets(batch[b], c);
                    epoch_loss += diff * diff;
                    delta(b, c) = 2.0 * diff / norm;
                }
            auto grads = stack_backward(net.layers_, activations, std::move(delta), true, nullptr);
            apply_gradient_update(net.layers_, grads, rms_state, config.optimizer,
                                  config.learning_rate, config.rms_decay, config.rms_stabilizer);
        }
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("Mlp::fit: training diverged at epoch " + std::to_string(epoch));
    }
    return net;
}

Matrix Mlp::predict(const Matrix& features) const {
    if (static_cast<int>(features.cols()) != input_dim())
        throw std::invalid_argument("Mlp::predict: input dimension mismatch");
    return stack_forward(layers_, features, true).back();
}

Vec Mlp::predict_one(std::span<const double> x) const {
    Matrix one(1, x.size());
    for (std::size_t c = 0; c < x.size(); ++c) one(0, c) = x[c];
    return predict(one).row_copy(0);
}

double Mlp::mse(const Matrix& features, const Matrix& targets) const {
    const Matrix out = predict(features);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const double diff = out.data()[i] - targets.data()[i];
        sum += diff * diff;
    }
    return sum / static_cast<double>(out.data().size());
}

std::vector<DenseLayer> Mlp::gradients(const Matrix& features, const Matrix& targets) const {
    auto activations = stack_forward(layers_, features, true);
    const Matrix& out = activations.back();
    Matrix delta(out.rows(), out.cols());
    const double norm = static_cast<double>(out.rows() * out.cols());
    for (std::size_t b = 0; b < out.rows(); ++b)
        for (std::size_t c = 0; c < out.cols(); ++c)
            delta(b, c) = 2.0 * (out(b, c) - targets(b, c)) / norm;
    return stack_backward(layers_, activations, std::move(delta), true, nullptr);
}

int Mlp::input_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols());
}

int Mlp::output_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().bias.size());
}

} // namespace duoboost
