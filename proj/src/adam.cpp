#include "soundcil/adam.hpp"

#include <cmath>

namespace soundcil {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg) : cfg_(cfg) {
    slots_.reserve(params.size());
    for (auto& p : params) {
        Slot s;
        s.m.assign(p.data().size(), real(0));
        s.v.assign(p.data().size(), real(0));
        s.param = std::move(p);
        slots_.push_back(std::move(s));
    }
}

void Adam::step() {
    ++step_count_;
    const real c1 = real(1) - std::pow(cfg_.beta1, static_cast<real>(step_count_));
    const real c2 = real(1) - std::pow(cfg_.beta2, static_cast<real>(step_count_));
    for (auto& s : slots_) {
        auto& p = s.param.data();
        const auto& g = s.param.grad();  // zeros if never touched by backward
        if (g.size() != p.size()) {
            throw ShapeError("adam: gradient size " + std::to_string(g.size()) +
                             " does not match parameter size " + std::to_string(p.size()));
        }
        for (size_t i = 0; i < p.size(); ++i) {
            s.m[i] = cfg_.beta1 * s.m[i] + (real(1) - cfg_.beta1) * g[i];
            s.v[i] = cfg_.beta2 * s.v[i] + (real(1) - cfg_.beta2) * g[i] * g[i];
            const real mhat = s.m[i] / c1;
            const real vhat = s.v[i] / c2;
            p[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

void Adam::zero_grad() {
    for (auto& s : slots_) s.param.zero_grad();
}

}  // namespace soundcil
