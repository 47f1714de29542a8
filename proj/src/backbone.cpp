#include "soundcil/backbone.hpp"

#include <sstream>

#include "soundcil/hash.hpp"

namespace soundcil {

uint64_t BackboneConfig::hash() const {
    std::ostringstream os;
    os << "in=" << in_channels << ";ch=";
    for (int c : channels) os << c << ',';
    os << ";sk=" << stem_kernel << ";bk=" << block_kernel << ";bs=" << block_stride
       << ";mom=" << bn_momentum << ";eps=" << bn_eps;
    return fnv1a64(os.str());
}

Tensor ResidualBlock::forward(const Tensor& x, Mode mode) {
    Tensor h = relu(bn1.forward(conv1.forward(x), mode));
    h = bn2.forward(conv2.forward(h), mode);
    Tensor shortcut = has_projection ? bn_proj.forward(proj.forward(x), mode) : x;
    return relu(add(h, shortcut));
}

BackboneModel::BackboneModel(const BackboneConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.channels.empty()) throw ShapeError("backbone: channel plan is empty");
    stem_ = Conv1dLayer::create(cfg.in_channels, cfg.channels[0], cfg.stem_kernel, 1,
                                cfg.stem_kernel / 2, rng);
    stem_bn_ = BatchNorm1dLayer::create(cfg.channels[0], cfg.bn_momentum, cfg.bn_eps);
    for (int b = 0; b < cfg.num_blocks(); ++b) {
        const int in_ch = cfg.channels[static_cast<size_t>(b)];
        const int out_ch = cfg.channels[static_cast<size_t>(b) + 1];
        const int stride = cfg.block_stride;
        ResidualBlock blk;
        blk.conv1 = Conv1dLayer::create(in_ch, out_ch, cfg.block_kernel, stride,
                                        cfg.block_kernel / 2, rng);
        blk.bn1 = BatchNorm1dLayer::create(out_ch, cfg.bn_momentum, cfg.bn_eps);
        blk.conv2 = Conv1dLayer::create(out_ch, out_ch, cfg.block_kernel, 1,
                                        cfg.block_kernel / 2, rng);
        blk.bn2 = BatchNorm1dLayer::create(out_ch, cfg.bn_momentum, cfg.bn_eps);
        blk.has_projection = in_ch != out_ch || stride != 1;
        if (blk.has_projection) {
            blk.proj = Conv1dLayer::create(in_ch, out_ch, 1, stride, 0, rng);
            blk.bn_proj = BatchNorm1dLayer::create(out_ch, cfg.bn_momentum, cfg.bn_eps);
        }
        blocks_.push_back(std::move(blk));
    }
}

Tensor BackboneModel::forward(const Tensor& x, Mode mode) {
    if (x.ndim() != 3 || x.dim(1) != cfg_.in_channels) {
        throw ShapeError("backbone: expected input [B," + std::to_string(cfg_.in_channels) +
                         ",T], got " + shape_str(x.shape()));
    }
    Tensor h = relu(stem_bn_.forward(stem_.forward(x), mode));
    for (auto& blk : blocks_) h = blk.forward(h, mode);
    return global_avg_pool_time(h);
}

int64_t BackboneModel::param_count() const {
    int64_t n = stem_.param_count() + stem_bn_.param_count();
    for (const auto& blk : blocks_) {
        n += blk.conv1.param_count() + blk.bn1.param_count();
        n += blk.conv2.param_count() + blk.bn2.param_count();
        if (blk.has_projection) n += blk.proj.param_count() + blk.bn_proj.param_count();
    }
    return n;
}

std::vector<Tensor> BackboneModel::parameters() {
    std::vector<NamedParam> params;
    std::vector<NamedBuffer> buffers;
    collect(params, buffers);
    std::vector<Tensor> out;
    out.reserve(params.size());
    for (auto& p : params) out.push_back(p.tensor);
    return out;
}

void BackboneModel::collect(std::vector<NamedParam>& params, std::vector<NamedBuffer>& buffers) {
    stem_.collect("stem", params);
    stem_bn_.collect("stem_bn", params, buffers);
    for (size_t b = 0; b < blocks_.size(); ++b) {
        const std::string pre = "block" + std::to_string(b);
        auto& blk = blocks_[b];
        blk.conv1.collect(pre + ".conv1", params);
        blk.bn1.collect(pre + ".bn1", params, buffers);
        blk.conv2.collect(pre + ".conv2", params);
        blk.bn2.collect(pre + ".bn2", params, buffers);
        if (blk.has_projection) {
            blk.proj.collect(pre + ".proj", params);
            blk.bn_proj.collect(pre + ".bn_proj", params, buffers);
        }
    }
}

BackboneModel BackboneModel::clone_detached() const {
    BackboneModel m;
    m.cfg_ = cfg_;
    m.stem_ = stem_.clone_detached();
    m.stem_bn_ = stem_bn_.clone_detached();
    for (const auto& blk : blocks_) {
        ResidualBlock c;
        c.conv1 = blk.conv1.clone_detached();
        c.bn1 = blk.bn1.clone_detached();
        c.conv2 = blk.conv2.clone_detached();
        c.bn2 = blk.bn2.clone_detached();
        c.has_projection = blk.has_projection;
        if (blk.has_projection) {
            c.proj = blk.proj.clone_detached();
            c.bn_proj = blk.bn_proj.clone_detached();
        }
        m.blocks_.push_back(std::move(c));
    }
    return m;
}

ClassifierHead::ClassifierHead(int feature_dim) : feature_dim_(feature_dim) {
    weight_ = Tensor({0, feature_dim}, true);
    bias_ = Tensor({0}, true);
}

void ClassifierHead::expand(int n_new, Rng& rng) {
    if (n_new < 1) throw ShapeError("head expand: n_new must be >= 1, got " + std::to_string(n_new));
    const int old_n = num_classes_;
    Tensor w({old_n + n_new, feature_dim_}, true);
    Tensor b({old_n + n_new}, true);
    for (size_t i = 0; i < weight_.data().size(); ++i) w.data()[i] = weight_.data()[i];
    for (size_t i = 0; i < bias_.data().size(); ++i) b.data()[i] = bias_.data()[i];
    const double bound = std::sqrt(6.0 / static_cast<double>(feature_dim_));
    for (int r = old_n; r < old_n + n_new; ++r) {
        for (int d = 0; d < feature_dim_; ++d) {
            w.data()[static_cast<size_t>(r) * feature_dim_ + d] =
                static_cast<real>(rng.uniform(-bound, bound));
        }
    }
    weight_ = std::move(w);
    bias_ = std::move(b);
    num_classes_ = old_n + n_new;
}

Tensor ClassifierHead::forward(const Tensor& features) const {
    if (num_classes_ == 0) throw ShapeError("head: no classes registered yet");
    if (features.ndim() != 2 || features.dim(1) != feature_dim_) {
        throw ShapeError("head: expected features [B," + std::to_string(feature_dim_) +
                         "], got " + shape_str(features.shape()));
    }
    return linear(features, weight_, bias_);
}

std::vector<Tensor> ClassifierHead::parameters() { return {weight_, bias_}; }

void ClassifierHead::collect(std::vector<NamedParam>& params) {
    params.push_back({"head.weight", weight_});
    params.push_back({"head.bias", bias_});
}

ClassifierHead ClassifierHead::clone_detached() const {
    ClassifierHead h(feature_dim_);
    h.num_classes_ = num_classes_;
    h.weight_ = clone_tensor_detached(weight_);
    h.bias_ = clone_tensor_detached(bias_);
    return h;
}

ModelSnapshot::ModelSnapshot(const BackboneModel& model, const ClassifierHead& head)
    : model_(model.clone_detached()), head_(head.clone_detached()) {}

Tensor ModelSnapshot::features(const Tensor& x) const {
    NoGradGuard ng;
    return model_.forward(x, Mode::Eval);
}

Tensor ModelSnapshot::logits(const Tensor& x) const {
    NoGradGuard ng;
    return head_.forward(model_.forward(x, Mode::Eval));
}

}  // namespace soundcil
