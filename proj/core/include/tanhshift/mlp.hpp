#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tanhshift/random.hpp"

namespace tanhshift {

/// Fully connected network with tanh hidden activations and a linear
/// output layer. Parameters live in one flat vector (per layer: weight
/// matrix row-major [rows x cols], then bias), so optimizers and
/// finite-difference checks can treat the network as a plain vector.
class Mlp {
public:
    Mlp(std::size_t input_dim, std::vector<std::size_t> hidden_dims, std::size_t output_dim);

    std::size_t input_dim() const { return input_; }
    std::size_t output_dim() const { return output_; }
    std::size_t param_count() const { return params_.size(); }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer.
    void init_uniform(Rng& rng);

    // Zeroes the output layer's weights and biases.
    void zero_output_layer();

    /// Captured activations from a forward pass; reuse one Trace across
    /// calls to keep the training loop allocation-free.
    struct Trace {
        // acts[0] is the input copy; acts[l+1] the post-tanh output of
        // hidden layer l. The linear output is not stored (not needed).
        std::vector<std::vector<double>> acts;
    };

    void forward(std::span<const double> x, std::span<double> out) const;
    void forward(std::span<const double> x, Trace& trace, std::span<double> out) const;

    // Accumulates dL/dparams into grad (size param_count) given the
    // upstream gradient d_out at the linear output. A non-empty d_input
    // (size input_dim) also receives dL/dx, accumulated.
    void backward(const Trace& trace, std::span<const double> d_out, std::span<double> grad,
                  std::span<double> d_input = {}) const;

private:
    struct Layer {
        std::size_t w_off;
        std::size_t b_off;
        std::size_t rows;
        std::size_t cols;
    };

    std::size_t input_;
    std::size_t output_;
    std::vector<Layer> layers_;
    std::vector<double> params_;
};

/// Adam with bias correction; state sized to one parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n_params, double learning_rate, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);

    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, epsilon_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace tanhshift
