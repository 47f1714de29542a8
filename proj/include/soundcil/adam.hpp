#pragma once

#include <cstdint>
#include <vector>

#include "soundcil/tensor.hpp"

namespace soundcil {

struct AdamConfig {
    real learning_rate = 1e-3;
    real beta1 = 0.9;
    real beta2 = 0.999;
    real epsilon = 1e-8;
};

// Standard Adam with bias correction. Per-parameter first/second moment
// buffers; step_count advances by exactly one per step().
class Adam {
public:
    explicit Adam(std::vector<Tensor> params, AdamConfig cfg = {});

    void step();
    void zero_grad();
    int64_t step_count() const { return step_count_; }
    const AdamConfig& config() const { return cfg_; }

private:
    struct Slot {
        Tensor param;
        std::vector<real> m;
        std::vector<real> v;
    };
    std::vector<Slot> slots_;
    AdamConfig cfg_;
    int64_t step_count_ = 0;
};

}  // namespace soundcil
