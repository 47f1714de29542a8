#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soundcil/layers.hpp"

namespace soundcil {

// Temporal residual CNN. MFCC coefficients enter as input channels; all
// convolutions run along time only. Kernel sizes and strides are config,
// defaults follow the TC-ResNet-8 family.
struct BackboneConfig {
    int in_channels = 40;
    std::vector<int> channels = {16, 24, 32, 48};  // stem output + one per block
    int stem_kernel = 3;
    int block_kernel = 9;
    int block_stride = 2;
    real bn_momentum = 0.1;
    real bn_eps = 1e-5;

    int feature_dim() const { return channels.back(); }
    int num_blocks() const { return static_cast<int>(channels.size()) - 1; }
    uint64_t hash() const;
};

struct ResidualBlock {
    Conv1dLayer conv1;
    BatchNorm1dLayer bn1;
    Conv1dLayer conv2;
    BatchNorm1dLayer bn2;
    bool has_projection = false;
    Conv1dLayer proj;
    BatchNorm1dLayer bn_proj;

    Tensor forward(const Tensor& x, Mode mode);
};

class BackboneModel {
public:
    BackboneModel(const BackboneConfig& cfg, Rng& rng);

    // x: [B, in_channels, T] -> [B, feature_dim]
    Tensor forward(const Tensor& x, Mode mode);

    const BackboneConfig& config() const { return cfg_; }
    int feature_dim() const { return cfg_.feature_dim(); }
    int64_t param_count() const;

    std::vector<Tensor> parameters();
    void collect(std::vector<NamedParam>& params, std::vector<NamedBuffer>& buffers);

    BackboneModel clone_detached() const;

private:
    BackboneModel() = default;
    BackboneConfig cfg_;
    Conv1dLayer stem_;
    BatchNorm1dLayer stem_bn_;
    std::vector<ResidualBlock> blocks_;
};

// Fully connected head over the pooled features; rows accumulate across
// tasks and existing rows are preserved verbatim on expansion.
class ClassifierHead {
public:
    explicit ClassifierHead(int feature_dim);

    int feature_dim() const { return feature_dim_; }
    int num_classes() const { return num_classes_; }

    void expand(int n_new, Rng& rng);

    // features: [B, feature_dim] -> logits [B, num_classes]
    Tensor forward(const Tensor& features) const;

    Tensor& weight() { return weight_; }
    Tensor& bias() { return bias_; }
    const Tensor& weight() const { return weight_; }
    const Tensor& bias() const { return bias_; }

    std::vector<Tensor> parameters();
    void collect(std::vector<NamedParam>& params);

    ClassifierHead clone_detached() const;

private:
    int feature_dim_;
    int num_classes_ = 0;
    Tensor weight_;  // [num_classes, feature_dim]
    Tensor bias_;    // [num_classes]
};

// Frozen copy of the previous-task model; eval-mode only, no gradient flow.
class ModelSnapshot {
public:
    ModelSnapshot(const BackboneModel& model, const ClassifierHead& head);

    Tensor features(const Tensor& x) const;
    Tensor logits(const Tensor& x) const;
    int num_classes() const { return head_.num_classes(); }

private:
    mutable BackboneModel model_;  // forward mutates nothing in eval mode
    ClassifierHead head_;
};

}  // namespace soundcil
