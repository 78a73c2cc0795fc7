#include "tanhshift/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace tanhshift {

Mlp::Mlp(std::size_t input_dim, std::vector<std::size_t> hidden_dims, std::size_t output_dim)
    : input_(input_dim), output_(output_dim) {
    if (input_ == 0 || output_ == 0) throw std::invalid_argument("mlp: zero-width layer");
    for (const std::size_t h : hidden_dims) {
        if (h == 0) throw std::invalid_argument("mlp: zero-width hidden layer");
    }

    std::size_t offset = 0;
    std::size_t cols = input_;
    for (std::size_t l = 0; l <= hidden_dims.size(); ++l) {
        const std::size_t rows = l < hidden_dims.size() ? hidden_dims[l] : output_;
        layers_.push_back({offset, offset + rows * cols, rows, cols});
        offset += rows * cols + rows;
        cols = rows;
    }
    params_.assign(offset, 0.0);
}

void Mlp::init_uniform(Rng& rng) {
    for (const Layer& layer : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.cols));
        for (std::size_t i = 0; i < layer.rows * layer.cols; ++i) {
            params_[layer.w_off + i] = rng.uniform(-bound, bound);
        }
        for (std::size_t i = 0; i < layer.rows; ++i) {
            params_[layer.b_off + i] = rng.uniform(-bound, bound);
        }
    }
}

void Mlp::zero_output_layer() {
    const Layer& out = layers_.back();
    for (std::size_t i = 0; i < out.rows * out.cols; ++i) params_[out.w_off + i] = 0.0;
    for (std::size_t i = 0; i < out.rows; ++i) params_[out.b_off + i] = 0.0;
}

void Mlp::forward(std::span<const double> x, std::span<double> out) const {
    Trace scratch;
    forward(x, scratch, out);
}

void Mlp::forward(std::span<const double> x, Trace& trace, std::span<double> out) const {
    if (x.size() != input_) throw std::invalid_argument("mlp forward: input size mismatch");
    if (out.size() != output_) throw std::invalid_argument("mlp forward: output size mismatch");

    trace.acts.resize(layers_.size());
    trace.acts[0].assign(x.begin(), x.end());

    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const bool last = l + 1 == layers_.size();
        const std::vector<double>& in = trace.acts[l];
        std::vector<double>* hidden_out = nullptr;
        if (!last) {
            trace.acts[l + 1].resize(layer.rows);
            hidden_out = &trace.acts[l + 1];
        }
        for (std::size_t r = 0; r < layer.rows; ++r) {
            const double* w = &params_[layer.w_off + r * layer.cols];
            double acc = params_[layer.b_off + r];
            for (std::size_t c = 0; c < layer.cols; ++c) acc += w[c] * in[c];
            if (last) {
                out[r] = acc;
            } else {
                (*hidden_out)[r] = std::tanh(acc);
            }
        }
    }
}

void Mlp::backward(const Trace& trace, std::span<const double> d_out, std::span<double> grad,
                   std::span<double> d_input) const {
    if (d_out.size() != output_) throw std::invalid_argument("mlp backward: d_out size mismatch");
    if (grad.size() != params_.size()) throw std::invalid_argument("mlp backward: grad size mismatch");
    if (!d_input.empty() && d_input.size() != input_) {
        throw std::invalid_argument("mlp backward: d_input size mismatch");
    }
    if (trace.acts.size() != layers_.size() || trace.acts[0].size() != input_) {
        throw std::invalid_argument("mlp backward: trace does not match a forward pass");
    }

    thread_local std::vector<double> delta, delta_prev;
    delta.assign(d_out.begin(), d_out.end());

    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Layer& layer = layers_[l];
        const std::vector<double>& in = trace.acts[l];
        const bool propagate = l > 0 || !d_input.empty();

        if (propagate) delta_prev.assign(layer.cols, 0.0);
        for (std::size_t r = 0; r < layer.rows; ++r) {
            const double dr = delta[r];
            double* gw = &grad[layer.w_off + r * layer.cols];
            const double* w = &params_[layer.w_off + r * layer.cols];
            for (std::size_t c = 0; c < layer.cols; ++c) {
                gw[c] += dr * in[c];
                if (propagate) delta_prev[c] += dr * w[c];
            }
            grad[layer.b_off + r] += dr;
        }

        if (l > 0) {
            // in == tanh(pre-activation), so tanh' = 1 - in^2.
            for (std::size_t c = 0; c < layer.cols; ++c) {
                delta_prev[c] *= 1.0 - in[c] * in[c];
            }
            std::swap(delta, delta_prev);
        } else if (!d_input.empty()) {
            for (std::size_t c = 0; c < input_; ++c) d_input[c] += delta_prev[c];
        }
    }
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon),
      m_(n_params, 0.0), v_(n_params, 0.0) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("adam: learning rate must be > 0");
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw std::invalid_argument("adam: parameter/gradient size mismatch");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
}

}  // namespace tanhshift
