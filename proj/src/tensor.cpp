#include "soundcil/tensor.hpp"

#include <sstream>
#include <unordered_set>
#include <utility>

namespace soundcil {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeError("negative dimension in shape " + shape_str(shape));
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int> shape, bool requires_grad) {
    impl_ = std::make_shared<detail::TensorImpl>();
    impl_->data.assign(static_cast<size_t>(shape_numel(shape)), real(0));
    impl_->shape = std::move(shape);
    impl_->requires_grad = requires_grad;
}

Tensor::Tensor(std::vector<int> shape, std::vector<real> values, bool requires_grad) {
    if (shape_numel(shape) != static_cast<int64_t>(values.size())) {
        throw ShapeError("tensor init: shape " + shape_str(shape) + " needs " +
                         std::to_string(shape_numel(shape)) + " values, got " +
                         std::to_string(values.size()));
    }
    impl_ = std::make_shared<detail::TensorImpl>();
    impl_->shape = std::move(shape);
    impl_->data = std::move(values);
    impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(real v, bool requires_grad) {
    return Tensor({1}, {v}, requires_grad);
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    return Tensor(std::move(shape), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, real v, bool requires_grad) {
    Tensor t(std::move(shape), requires_grad);
    for (auto& x : t.data()) x = v;
    return t;
}

const std::vector<int>& Tensor::shape() const { return impl_->shape; }
int Tensor::ndim() const { return static_cast<int>(impl_->shape.size()); }

int Tensor::dim(int i) const {
    if (i < 0 || i >= ndim()) throw ShapeError("dim index out of range");
    return impl_->shape[static_cast<size_t>(i)];
}

int64_t Tensor::numel() const { return impl_ ? impl_->numel() : 0; }

std::vector<real>& Tensor::data() { return impl_->data; }
const std::vector<real>& Tensor::data() const { return impl_->data; }

real Tensor::item() const {
    if (!impl_ || impl_->numel() != 1) {
        throw ShapeError("item(): tensor is not a scalar");
    }
    return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

void Tensor::set_requires_grad(bool v) {
    if (impl_->node) throw std::logic_error("set_requires_grad on a non-leaf tensor");
    impl_->requires_grad = v;
}

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

std::vector<real>& Tensor::grad() { return detail::ensure_grad(*impl_); }

const std::vector<real>& Tensor::grad() const {
    if (impl_->grad.empty()) throw std::logic_error("grad(): gradient never populated");
    return impl_->grad;
}

void Tensor::zero_grad() {
    if (impl_ && !impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), real(0));
}

Tensor Tensor::detach() const {
    Tensor t;
    if (impl_) {
        t.impl_ = std::make_shared<detail::TensorImpl>();
        t.impl_->shape = impl_->shape;
        t.impl_->data = impl_->data;
    }
    return t;
}

void Tensor::backward() {
    if (!impl_) throw std::logic_error("backward(): undefined tensor");
    if (impl_->numel() != 1) {
        throw ShapeError("backward(): loss must be scalar, got shape " + shape_str(impl_->shape));
    }
    if (!impl_->node) {
        throw std::logic_error("backward(): tensor is detached from any computation tape");
    }
    if (impl_->node->consumed) {
        throw std::logic_error("backward(): tape already consumed; rerun the forward pass");
    }

    // Post-order DFS over impls with grad nodes; reversed it runs every
    // consumer before its producers.
    std::vector<detail::TensorImpl*> topo;
    std::unordered_set<detail::TensorImpl*> visited;
    std::vector<std::pair<detail::TensorImpl*, size_t>> stack;
    stack.emplace_back(impl_.get(), 0);
    visited.insert(impl_.get());
    while (!stack.empty()) {
        auto& [node_impl, idx] = stack.back();
        if (!node_impl->node || idx == node_impl->node->inputs.size()) {
            topo.push_back(node_impl);
            stack.pop_back();
            continue;
        }
        detail::TensorImpl* child = node_impl->node->inputs[idx++].get();
        if (child->node && !visited.count(child)) {
            visited.insert(child);
            stack.emplace_back(child, 0);
        }
    }

    detail::ensure_grad(*impl_)[0] += real(1);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        detail::TensorImpl* t = *it;
        if (t->node && t->node->apply) t->node->apply(*t);
    }

    // Free the tape; the consumed flag turns a second sweep into an error.
    for (detail::TensorImpl* t : topo) {
        if (t->node) {
            t->node->consumed = true;
            t->node->apply = nullptr;
            t->node->inputs.clear();
        }
    }
}

Tensor make_from_op(std::vector<int> shape, std::vector<real> data,
                    const std::vector<Tensor>& inputs,
                    std::function<void(detail::TensorImpl&)> backward_fn) {
    Tensor out(std::move(shape), std::move(data), false);
    bool needs = false;
    if (g_grad_enabled) {
        for (const auto& in : inputs) {
            if (in.requires_grad()) {
                needs = true;
                break;
            }
        }
    }
    if (needs) {
        auto node = std::make_shared<detail::GradNode>();
        node->inputs.reserve(inputs.size());
        for (const auto& in : inputs) node->inputs.push_back(in.impl());
        node->apply = std::move(backward_fn);
        out.impl()->node = std::move(node);
        out.impl()->requires_grad = true;
    }
    return out;
}

}  // namespace soundcil
