#pragma once

#include <string>
#include <vector>

#include "soundcil/ops.hpp"
#include "soundcil/rng.hpp"
#include "soundcil/tensor.hpp"

namespace soundcil {

struct NamedParam {
    std::string name;
    Tensor tensor;
};

struct NamedBuffer {
    std::string name;
    std::vector<real>* values;
};

struct Conv1dLayer {
    Tensor weight;  // [Cout, Cin, K]
    Tensor bias;    // [Cout]
    int stride = 1;
    int padding = 0;

    static Conv1dLayer create(int in_ch, int out_ch, int kernel, int stride, int padding,
                              Rng& rng);
    Tensor forward(const Tensor& x) const { return conv1d_temporal(x, weight, bias, stride, padding); }
    Conv1dLayer clone_detached() const;
    int64_t param_count() const { return weight.numel() + bias.numel(); }
    void collect(const std::string& prefix, std::vector<NamedParam>& params);
};

struct BatchNorm1dLayer {
    Tensor gamma;
    Tensor beta;
    BatchNormStats stats;
    real momentum = 0.1;
    real eps = 1e-5;

    static BatchNorm1dLayer create(int channels, real momentum, real eps);
    Tensor forward(const Tensor& x, Mode mode) {
        return batch_norm1d(x, gamma, beta, stats, mode, momentum, eps);
    }
    BatchNorm1dLayer clone_detached() const;
    int64_t param_count() const { return gamma.numel() + beta.numel(); }
    void collect(const std::string& prefix, std::vector<NamedParam>& params,
                 std::vector<NamedBuffer>& buffers);
};

struct LinearLayer {
    Tensor weight;  // [O, D]
    Tensor bias;    // [O]

    static LinearLayer create(int in_dim, int out_dim, Rng& rng);
    static LinearLayer create_zero(int in_dim, int out_dim);
    static LinearLayer create_identity(int dim);
    Tensor forward(const Tensor& x) const { return linear(x, weight, bias); }
    LinearLayer clone_detached() const;
    int64_t param_count() const { return weight.numel() + bias.numel(); }
    void collect(const std::string& prefix, std::vector<NamedParam>& params);
};

// Kaiming-style uniform fill: U(-sqrt(6/fan_in), sqrt(6/fan_in)).
void kaiming_uniform_fill(Tensor& t, int fan_in, Rng& rng);

Tensor clone_tensor_detached(const Tensor& t, bool requires_grad = false);

}  // namespace soundcil
