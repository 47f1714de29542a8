#include "soundcil/layers.hpp"

#include <cmath>

namespace soundcil {

void kaiming_uniform_fill(Tensor& t, int fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : t.data()) v = static_cast<real>(rng.uniform(-bound, bound));
}

Tensor clone_tensor_detached(const Tensor& t, bool requires_grad) {
    Tensor c(t.shape(), t.data(), requires_grad);
    return c;
}

Conv1dLayer Conv1dLayer::create(int in_ch, int out_ch, int kernel, int stride, int padding,
                                Rng& rng) {
    Conv1dLayer l;
    l.weight = Tensor({out_ch, in_ch, kernel}, true);
    l.bias = Tensor({out_ch}, true);
    kaiming_uniform_fill(l.weight, in_ch * kernel, rng);
    l.stride = stride;
    l.padding = padding;
    return l;
}

Conv1dLayer Conv1dLayer::clone_detached() const {
    Conv1dLayer l;
    l.weight = clone_tensor_detached(weight);
    l.bias = clone_tensor_detached(bias);
    l.stride = stride;
    l.padding = padding;
    return l;
}

void Conv1dLayer::collect(const std::string& prefix, std::vector<NamedParam>& params) {
    params.push_back({prefix + ".weight", weight});
    params.push_back({prefix + ".bias", bias});
}

BatchNorm1dLayer BatchNorm1dLayer::create(int channels, real momentum, real eps) {
    BatchNorm1dLayer l;
    l.gamma = Tensor::full({channels}, real(1), true);
    l.beta = Tensor({channels}, true);
    l.stats = BatchNormStats(channels);
    l.momentum = momentum;
    l.eps = eps;
    return l;
}

BatchNorm1dLayer BatchNorm1dLayer::clone_detached() const {
    BatchNorm1dLayer l;
    l.gamma = clone_tensor_detached(gamma);
    l.beta = clone_tensor_detached(beta);
    l.stats = stats;
    l.momentum = momentum;
    l.eps = eps;
    return l;
}

void BatchNorm1dLayer::collect(const std::string& prefix, std::vector<NamedParam>& params,
                               std::vector<NamedBuffer>& buffers) {
    params.push_back({prefix + ".gamma", gamma});
    params.push_back({prefix + ".beta", beta});
    buffers.push_back({prefix + ".running_mean", &stats.running_mean});
    buffers.push_back({prefix + ".running_var", &stats.running_var});
}

LinearLayer LinearLayer::create(int in_dim, int out_dim, Rng& rng) {
    LinearLayer l;
    l.weight = Tensor({out_dim, in_dim}, true);
    l.bias = Tensor({out_dim}, true);
    kaiming_uniform_fill(l.weight, in_dim, rng);
    return l;
}

LinearLayer LinearLayer::create_zero(int in_dim, int out_dim) {
    LinearLayer l;
    l.weight = Tensor({out_dim, in_dim}, true);
    l.bias = Tensor({out_dim}, true);
    return l;
}

LinearLayer LinearLayer::create_identity(int dim) {
    LinearLayer l;
    l.weight = Tensor({dim, dim}, true);
    l.bias = Tensor({dim}, true);
    for (int i = 0; i < dim; ++i) l.weight.data()[static_cast<size_t>(i) * dim + i] = real(1);
    return l;
}

LinearLayer LinearLayer::clone_detached() const {
    LinearLayer l;
    l.weight = clone_tensor_detached(weight);
    l.bias = clone_tensor_detached(bias);
    return l;
}

void LinearLayer::collect(const std::string& prefix, std::vector<NamedParam>& params) {
    params.push_back({prefix + ".weight", weight});
    params.push_back({prefix + ".bias", bias});
}

}  // namespace soundcil
