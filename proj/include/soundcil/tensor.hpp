#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "soundcil/errors.hpp"

namespace soundcil {

#ifdef SOUNDCIL_REAL32
using real = float;
#else
using real = double;
#endif

namespace detail {

struct GradNode;

struct TensorImpl {
    std::vector<int> shape;
    std::vector<real> data;
    bool requires_grad = false;
    std::vector<real> grad;            // empty until first accumulation
    std::shared_ptr<GradNode> node;    // creator op; null for leaves

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
};

struct GradNode {
    std::vector<std::shared_ptr<TensorImpl>> inputs;
    // Reads out.grad, accumulates into the inputs' grads.
    std::function<void(TensorImpl&)> apply;
    bool consumed = false;
};

// Allocates (zero-filled) on first touch.
inline std::vector<real>& ensure_grad(TensorImpl& t) {
    if (t.grad.empty()) t.grad.assign(t.data.size(), real(0));
    return t.grad;
}

}  // namespace detail

bool grad_enabled();

// Disables tape recording in scope (snapshot/eval forwards).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

std::string shape_str(const std::vector<int>& shape);
int64_t shape_numel(const std::vector<int>& shape);

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, bool requires_grad = false);
    Tensor(std::vector<int> shape, std::vector<real> values, bool requires_grad = false);

    static Tensor scalar(real v, bool requires_grad = false);
    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, real v, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const std::vector<int>& shape() const;
    int ndim() const;
    int dim(int i) const;
    int64_t numel() const;

    std::vector<real>& data();
    const std::vector<real>& data() const;
    real item() const;  // scalar tensors only

    bool requires_grad() const;
    void set_requires_grad(bool v);  // leaves only
    bool has_grad() const;
    std::vector<real>& grad();              // allocates zeros on demand
    const std::vector<real>& grad() const;  // throws if never populated
    void zero_grad();

    // Reverse-mode sweep from a scalar loss. Frees the tape afterwards;
    // calling it again on the same tape is an error.
    void backward();

    Tensor detach() const;

    std::shared_ptr<detail::TensorImpl> impl() const { return impl_; }

private:
    std::shared_ptr<detail::TensorImpl> impl_;
};

// Builds an op result, recording a grad node when the tape is live and any
// input requires grad. `backward_fn` must accumulate (+=) into input grads.
Tensor make_from_op(std::vector<int> shape, std::vector<real> data,
                    const std::vector<Tensor>& inputs,
                    std::function<void(detail::TensorImpl&)> backward_fn);

}  // namespace soundcil
