#pragma once

#include <vector>

#include "soundcil/tensor.hpp"

namespace soundcil {

enum class Mode { Train, Eval };

struct BatchNormStats {
    std::vector<real> running_mean;
    std::vector<real> running_var;

    explicit BatchNormStats(int channels = 0)
        : running_mean(static_cast<size_t>(channels), real(0)),
          running_var(static_cast<size_t>(channels), real(1)) {}
};

// Elementwise / reductions. All ops are pure w.r.t. their tensor inputs and
// record backward closures on the active tape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, real s);
Tensor sum(const Tensor& a);
Tensor relu(const Tensor& x);

// x: [B, Cin, T], w: [Cout, Cin, K], b: [Cout]. Cross-correlation along time;
// T_out = floor((T + 2p - K)/stride) + 1.
Tensor conv1d_temporal(const Tensor& x, const Tensor& w, const Tensor& b,
                       int stride, int padding);

// x: [B, C, T]. Train mode normalizes by batch statistics over (B, T) per
// channel (population variance) and updates running stats in place:
// running = (1 - momentum) * running + momentum * batch.
Tensor batch_norm1d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    BatchNormStats& stats, Mode mode, real momentum, real eps);

// x: [B, D], w: [O, D], b: [O] -> [B, O]
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

// [B, C, T] -> [B, C], mean over the time axis.
Tensor global_avg_pool_time(const Tensor& x);

// Row-wise softmax over [B, C].
Tensor softmax(const Tensor& x);

// Mean over the batch of -log softmax(logits)[label], max-subtraction
// stabilized. labels are row-local class indices.
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

// Mean over the batch of the Euclidean norm of (a - b) per row. a, b: [B, D].
Tensor l2_distance(const Tensor& a, const Tensor& b);

}  // namespace soundcil
