#include "soundcil/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace soundcil {

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape("add", a, b);
    std::vector<real> out(a.data().size());
    const auto& ad = a.data();
    const auto& bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = ad[i] + bd[i];
    auto ai = a.impl();
    auto bi = b.impl();
    return make_from_op(a.shape(), std::move(out), {a, b}, [ai, bi](detail::TensorImpl& o) {
        const auto& g = o.grad;
        if (ai->requires_grad) {
            auto& ga = detail::ensure_grad(*ai);
            for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (bi->requires_grad) {
            auto& gb = detail::ensure_grad(*bi);
            for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape("mul", a, b);
    std::vector<real> out(a.data().size());
    const auto& ad = a.data();
    const auto& bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i];
    auto ai = a.impl();
    auto bi = b.impl();
    return make_from_op(a.shape(), std::move(out), {a, b}, [ai, bi](detail::TensorImpl& o) {
        const auto& g = o.grad;
        if (ai->requires_grad) {
            auto& ga = detail::ensure_grad(*ai);
            for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bi->data[i];
        }
        if (bi->requires_grad) {
            auto& gb = detail::ensure_grad(*bi);
            for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * ai->data[i];
        }
    });
}

Tensor scale(const Tensor& a, real s) {
    std::vector<real> out(a.data().size());
    const auto& ad = a.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * s;
    auto ai = a.impl();
    return make_from_op(a.shape(), std::move(out), {a}, [ai, s](detail::TensorImpl& o) {
        if (!ai->requires_grad) return;
        auto& ga = detail::ensure_grad(*ai);
        const auto& g = o.grad;
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * s;
    });
}

Tensor sum(const Tensor& a) {
    real acc = 0;
    for (real v : a.data()) acc += v;
    auto ai = a.impl();
    return make_from_op({1}, {acc}, {a}, [ai](detail::TensorImpl& o) {
        if (!ai->requires_grad) return;
        auto& ga = detail::ensure_grad(*ai);
        const real g = o.grad[0];
        for (auto& v : ga) v += g;
    });
}

Tensor relu(const Tensor& x) {
    std::vector<real> out(x.data().size());
    const auto& xd = x.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = xd[i] > 0 ? xd[i] : real(0);
    auto xi = x.impl();
    return make_from_op(x.shape(), std::move(out), {x}, [xi](detail::TensorImpl& o) {
        if (!xi->requires_grad) return;
        auto& gx = detail::ensure_grad(*xi);
        const auto& g = o.grad;
        for (size_t i = 0; i < g.size(); ++i) {
            if (xi->data[i] > 0) gx[i] += g[i];
        }
    });
}

namespace {

// Valid output range for one kernel tap: 0 <= to*stride + off <= T-1.
inline void tap_range(int off, int stride, int T, int Tout, int& lo, int& hi) {
    lo = off < 0 ? (-off + stride - 1) / stride : 0;
    hi = T - 1 - off < 0 ? -1 : std::min(Tout - 1, (T - 1 - off) / stride);
}

}  // namespace

Tensor conv1d_temporal(const Tensor& x, const Tensor& w, const Tensor& b,
                       int stride, int padding) {
    if (x.ndim() != 3) throw ShapeError("conv1d_temporal: input must be [B,Cin,T], got " + shape_str(x.shape()));
    if (w.ndim() != 3) throw ShapeError("conv1d_temporal: weight must be [Cout,Cin,K], got " + shape_str(w.shape()));
    const int B = x.dim(0), Cin = x.dim(1), T = x.dim(2);
    const int Cout = w.dim(0), K = w.dim(2);
    if (w.dim(1) != Cin) {
        throw ShapeError("conv1d_temporal: input channels (" + std::to_string(Cin) +
                         ") do not match weight channels (" + std::to_string(w.dim(1)) + ")");
    }
    if (b.ndim() != 1 || b.dim(0) != Cout) {
        throw ShapeError("conv1d_temporal: bias must be [Cout]=" + std::to_string(Cout) +
                         ", got " + shape_str(b.shape()));
    }
    if (stride < 1) throw ShapeError("conv1d_temporal: stride must be >= 1");
    if (padding < 0) throw ShapeError("conv1d_temporal: padding must be >= 0");
    if (K > T + 2 * padding) {
        throw ShapeError("conv1d_temporal: kernel " + std::to_string(K) +
                         " exceeds padded length " + std::to_string(T + 2 * padding));
    }
    const int Tout = (T + 2 * padding - K) / stride + 1;

    std::vector<real> out(static_cast<size_t>(B) * Cout * Tout);
    const real* xd = x.data().data();
    const real* wd = w.data().data();
    const real* bd = b.data().data();
    for (int bi = 0; bi < B; ++bi) {
        for (int co = 0; co < Cout; ++co) {
            real* orow = out.data() + (static_cast<size_t>(bi) * Cout + co) * Tout;
            const real bias = bd[co];
            for (int t = 0; t < Tout; ++t) orow[t] = bias;
            for (int ci = 0; ci < Cin; ++ci) {
                const real* xrow = xd + (static_cast<size_t>(bi) * Cin + ci) * T;
                const real* wrow = wd + (static_cast<size_t>(co) * Cin + ci) * K;
                for (int k = 0; k < K; ++k) {
                    const real wv = wrow[k];
                    const int off = k - padding;
                    int lo, hi;
                    tap_range(off, stride, T, Tout, lo, hi);
                    if (stride == 1) {
                        const real* xs = xrow + off;
                        for (int t = lo; t <= hi; ++t) orow[t] += wv * xs[t];
                    } else {
                        for (int t = lo; t <= hi; ++t) orow[t] += wv * xrow[t * stride + off];
                    }
                }
            }
        }
    }

    auto xi = x.impl();
    auto wi = w.impl();
    auto bim = b.impl();
    auto bwd = [xi, wi, bim, B, Cin, Cout, T, K, Tout, stride, padding](detail::TensorImpl& o) {
        const real* g = o.grad.data();
        const real* xd = xi->data.data();
        const real* wd = wi->data.data();
        if (xi->requires_grad) {
            real* dx = detail::ensure_grad(*xi).data();
            for (int bi = 0; bi < B; ++bi) {
                for (int ci = 0; ci < Cin; ++ci) {
                    real* dxrow = dx + (static_cast<size_t>(bi) * Cin + ci) * T;
                    for (int co = 0; co < Cout; ++co) {
                        const real* grow = g + (static_cast<size_t>(bi) * Cout + co) * Tout;
                        const real* wrow = wd + (static_cast<size_t>(co) * Cin + ci) * K;
                        for (int k = 0; k < K; ++k) {
                            const real wv = wrow[k];
                            const int off = k - padding;
                            int lo, hi;
                            tap_range(off, stride, T, Tout, lo, hi);
                            if (stride == 1) {
                                real* ds = dxrow + off;
                                for (int t = lo; t <= hi; ++t) ds[t] += wv * grow[t];
                            } else {
                                for (int t = lo; t <= hi; ++t) dxrow[t * stride + off] += wv * grow[t];
                            }
                        }
                    }
                }
            }
        }
        if (wi->requires_grad) {
            real* dw = detail::ensure_grad(*wi).data();
            for (int co = 0; co < Cout; ++co) {
                for (int ci = 0; ci < Cin; ++ci) {
                    real* dwrow = dw + (static_cast<size_t>(co) * Cin + ci) * K;
                    for (int k = 0; k < K; ++k) {
                        const int off = k - padding;
                        int lo, hi;
                        tap_range(off, stride, T, Tout, lo, hi);
                        real acc = 0;
                        for (int bi = 0; bi < B; ++bi) {
                            const real* grow = g + (static_cast<size_t>(bi) * Cout + co) * Tout;
                            const real* xrow = xd + (static_cast<size_t>(bi) * Cin + ci) * T;
                            if (stride == 1) {
                                const real* xs = xrow + off;
                                for (int t = lo; t <= hi; ++t) acc += grow[t] * xs[t];
                            } else {
                                for (int t = lo; t <= hi; ++t) acc += grow[t] * xrow[t * stride + off];
                            }
                        }
                        dwrow[k] += acc;
                    }
                }
            }
        }
        if (bim->requires_grad) {
            real* db = detail::ensure_grad(*bim).data();
            for (int co = 0; co < Cout; ++co) {
                real acc = 0;
                for (int bi = 0; bi < B; ++bi) {
                    const real* grow = g + (static_cast<size_t>(bi) * Cout + co) * Tout;
                    for (int t = 0; t < Tout; ++t) acc += grow[t];
                }
                db[co] += acc;
            }
        }
    };
    return make_from_op({B, Cout, Tout}, std::move(out), {x, w, b}, std::move(bwd));
}

Tensor batch_norm1d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    BatchNormStats& stats, Mode mode, real momentum, real eps) {
    if (x.ndim() != 3) throw ShapeError("batch_norm1d: input must be [B,C,T], got " + shape_str(x.shape()));
    const int B = x.dim(0), C = x.dim(1), T = x.dim(2);
    if (gamma.numel() != C || beta.numel() != C) {
        throw ShapeError("batch_norm1d: gamma/beta must have " + std::to_string(C) + " channels");
    }
    if (static_cast<int>(stats.running_mean.size()) != C) {
        throw ShapeError("batch_norm1d: running stats sized " +
                         std::to_string(stats.running_mean.size()) + ", expected " + std::to_string(C));
    }
    const int64_t N = static_cast<int64_t>(B) * T;
    if (N < 1) throw ShapeError("batch_norm1d: empty input");

    std::vector<real> mean(C), inv_std(C);
    if (mode == Mode::Train) {
        const real* xd = x.data().data();
        for (int c = 0; c < C; ++c) {
            real m = 0;
            for (int bi = 0; bi < B; ++bi) {
                const real* row = xd + (static_cast<size_t>(bi) * C + c) * T;
                for (int t = 0; t < T; ++t) m += row[t];
            }
            m /= static_cast<real>(N);
            real var = 0;
            for (int bi = 0; bi < B; ++bi) {
                const real* row = xd + (static_cast<size_t>(bi) * C + c) * T;
                for (int t = 0; t < T; ++t) {
                    const real d = row[t] - m;
                    var += d * d;
                }
            }
            var /= static_cast<real>(N);
            mean[c] = m;
            inv_std[c] = real(1) / std::sqrt(var + eps);
            stats.running_mean[c] = (real(1) - momentum) * stats.running_mean[c] + momentum * m;
            stats.running_var[c] = (real(1) - momentum) * stats.running_var[c] + momentum * var;
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[c] = stats.running_mean[c];
            inv_std[c] = real(1) / std::sqrt(stats.running_var[c] + eps);
        }
    }

    std::vector<real> xhat(x.data().size());
    std::vector<real> out(x.data().size());
    {
        const real* xd = x.data().data();
        const real* gd = gamma.data().data();
        const real* bd = beta.data().data();
        for (int bi = 0; bi < B; ++bi) {
            for (int c = 0; c < C; ++c) {
                const size_t base = (static_cast<size_t>(bi) * C + c) * T;
                const real m = mean[c], is = inv_std[c], gm = gd[c], bt = bd[c];
                for (int t = 0; t < T; ++t) {
                    const real h = (xd[base + t] - m) * is;
                    xhat[base + t] = h;
                    out[base + t] = gm * h + bt;
                }
            }
        }
    }

    auto xi = x.impl();
    auto gi = gamma.impl();
    auto bi_ = beta.impl();
    auto bwd = [xi, gi, bi_, B, C, T, N, mode, xh = std::move(xhat),
                is = std::move(inv_std)](detail::TensorImpl& o) {
        const real* g = o.grad.data();
        if (gi->requires_grad) {
            real* dg = detail::ensure_grad(*gi).data();
            for (int c = 0; c < C; ++c) {
                real acc = 0;
                for (int bidx = 0; bidx < B; ++bidx) {
                    const size_t base = (static_cast<size_t>(bidx) * C + c) * T;
                    for (int t = 0; t < T; ++t) acc += g[base + t] * xh[base + t];
                }
                dg[c] += acc;
            }
        }
        if (bi_->requires_grad) {
            real* db = detail::ensure_grad(*bi_).data();
            for (int c = 0; c < C; ++c) {
                real acc = 0;
                for (int bidx = 0; bidx < B; ++bidx) {
                    const size_t base = (static_cast<size_t>(bidx) * C + c) * T;
                    for (int t = 0; t < T; ++t) acc += g[base + t];
                }
                db[c] += acc;
            }
        }
        if (xi->requires_grad) {
            real* dx = detail::ensure_grad(*xi).data();
            const real* gm = gi->data.data();
            if (mode == Mode::Eval) {
                for (int bidx = 0; bidx < B; ++bidx) {
                    for (int c = 0; c < C; ++c) {
                        const size_t base = (static_cast<size_t>(bidx) * C + c) * T;
                        const real k = gm[c] * is[c];
                        for (int t = 0; t < T; ++t) dx[base + t] += g[base + t] * k;
                    }
                }
            } else {
                for (int c = 0; c < C; ++c) {
                    real sum_g = 0, sum_gh = 0;
                    for (int bidx = 0; bidx < B; ++bidx) {
                        const size_t base = (static_cast<size_t>(bidx) * C + c) * T;
                        for (int t = 0; t < T; ++t) {
                            sum_g += g[base + t];
                            sum_gh += g[base + t] * xh[base + t];
                        }
                    }
                    const real mg = sum_g / static_cast<real>(N);
                    const real mgh = sum_gh / static_cast<real>(N);
                    const real k = gm[c] * is[c];
                    for (int bidx = 0; bidx < B; ++bidx) {
                        const size_t base = (static_cast<size_t>(bidx) * C + c) * T;
                        for (int t = 0; t < T; ++t) {
                            dx[base + t] += k * (g[base + t] - mg - xh[base + t] * mgh);
                        }
                    }
                }
            }
        }
    };
    return make_from_op(x.shape(), std::move(out), {x, gamma, beta}, std::move(bwd));
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (x.ndim() != 2) throw ShapeError("linear: input must be [B,D], got " + shape_str(x.shape()));
    if (w.ndim() != 2) throw ShapeError("linear: weight must be [O,D], got " + shape_str(w.shape()));
    const int B = x.dim(0), D = x.dim(1), O = w.dim(0);
    if (w.dim(1) != D) {
        throw ShapeError("linear: input dim " + std::to_string(D) + " does not match weight dim " +
                         std::to_string(w.dim(1)));
    }
    if (b.numel() != O) throw ShapeError("linear: bias must have " + std::to_string(O) + " entries");

    std::vector<real> out(static_cast<size_t>(B) * O);
    const real* xd = x.data().data();
    const real* wd = w.data().data();
    const real* bd = b.data().data();
    for (int bi = 0; bi < B; ++bi) {
        const real* xrow = xd + static_cast<size_t>(bi) * D;
        real* orow = out.data() + static_cast<size_t>(bi) * O;
        for (int o = 0; o < O; ++o) {
            const real* wrow = wd + static_cast<size_t>(o) * D;
            real acc = bd[o];
            for (int d = 0; d < D; ++d) acc += xrow[d] * wrow[d];
            orow[o] = acc;
        }
    }

    auto xi = x.impl();
    auto wi = w.impl();
    auto bim = b.impl();
    auto bwd = [xi, wi, bim, B, D, O](detail::TensorImpl& out_impl) {
        const real* g = out_impl.grad.data();
        if (xi->requires_grad) {
            real* dx = detail::ensure_grad(*xi).data();
            const real* wd = wi->data.data();
            for (int bi = 0; bi < B; ++bi) {
                const real* grow = g + static_cast<size_t>(bi) * O;
                real* dxrow = dx + static_cast<size_t>(bi) * D;
                for (int o = 0; o < O; ++o) {
                    const real gv = grow[o];
                    const real* wrow = wd + static_cast<size_t>(o) * D;
                    for (int d = 0; d < D; ++d) dxrow[d] += gv * wrow[d];
                }
            }
        }
        if (wi->requires_grad) {
            real* dw = detail::ensure_grad(*wi).data();
            const real* xd = xi->data.data();
            for (int bi = 0; bi < B; ++bi) {
                const real* grow = g + static_cast<size_t>(bi) * O;
                const real* xrow = xd + static_cast<size_t>(bi) * D;
                for (int o = 0; o < O; ++o) {
                    const real gv = grow[o];
                    real* dwrow = dw + static_cast<size_t>(o) * D;
                    for (int d = 0; d < D; ++d) dwrow[d] += gv * xrow[d];
                }
            }
        }
        if (bim->requires_grad) {
            real* db = detail::ensure_grad(*bim).data();
            for (int bi = 0; bi < B; ++bi) {
                const real* grow = g + static_cast<size_t>(bi) * O;
                for (int o = 0; o < O; ++o) db[o] += grow[o];
            }
        }
    };
    return make_from_op({B, O}, std::move(out), {x, w, b}, std::move(bwd));
}

Tensor global_avg_pool_time(const Tensor& x) {
    if (x.ndim() != 3) throw ShapeError("global_avg_pool_time: input must be [B,C,T], got " + shape_str(x.shape()));
    const int B = x.dim(0), C = x.dim(1), T = x.dim(2);
    if (T < 1) throw ShapeError("global_avg_pool_time: empty time axis");
    std::vector<real> out(static_cast<size_t>(B) * C);
    const real* xd = x.data().data();
    for (int bi = 0; bi < B; ++bi) {
        for (int c = 0; c < C; ++c) {
            const real* row = xd + (static_cast<size_t>(bi) * C + c) * T;
            real acc = 0;
            for (int t = 0; t < T; ++t) acc += row[t];
            out[static_cast<size_t>(bi) * C + c] = acc / static_cast<real>(T);
        }
    }
    auto xi = x.impl();
    auto bwd = [xi, B, C, T](detail::TensorImpl& o) {
        if (!xi->requires_grad) return;
        real* dx = detail::ensure_grad(*xi).data();
        const real* g = o.grad.data();
        const real invT = real(1) / static_cast<real>(T);
        for (int bi = 0; bi < B; ++bi) {
            for (int c = 0; c < C; ++c) {
                const real gv = g[static_cast<size_t>(bi) * C + c] * invT;
                real* row = dx + (static_cast<size_t>(bi) * C + c) * T;
                for (int t = 0; t < T; ++t) row[t] += gv;
            }
        }
    };
    return make_from_op({B, C}, std::move(out), {x}, std::move(bwd));
}

Tensor softmax(const Tensor& x) {
    if (x.ndim() != 2) throw ShapeError("softmax: input must be [B,C], got " + shape_str(x.shape()));
    const int B = x.dim(0), C = x.dim(1);
    std::vector<real> out(x.data().size());
    const real* xd = x.data().data();
    for (int bi = 0; bi < B; ++bi) {
        const real* row = xd + static_cast<size_t>(bi) * C;
        real* orow = out.data() + static_cast<size_t>(bi) * C;
        real mx = row[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
        real z = 0;
        for (int c = 0; c < C; ++c) {
            orow[c] = std::exp(row[c] - mx);
            z += orow[c];
        }
        for (int c = 0; c < C; ++c) orow[c] /= z;
    }
    auto xi = x.impl();
    auto bwd = [xi, B, C, y = out](detail::TensorImpl& o) {
        if (!xi->requires_grad) return;
        real* dx = detail::ensure_grad(*xi).data();
        const real* g = o.grad.data();
        for (int bi = 0; bi < B; ++bi) {
            const size_t base = static_cast<size_t>(bi) * C;
            real dot = 0;
            for (int c = 0; c < C; ++c) dot += g[base + c] * y[base + c];
            for (int c = 0; c < C; ++c) dx[base + c] += y[base + c] * (g[base + c] - dot);
        }
    };
    return make_from_op(x.shape(), std::move(out), {x}, std::move(bwd));
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    if (logits.ndim() != 2) {
        throw ShapeError("softmax_cross_entropy: logits must be [B,C], got " + shape_str(logits.shape()));
    }
    const int B = logits.dim(0), C = logits.dim(1);
    if (static_cast<int>(labels.size()) != B) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for batch of " + std::to_string(B));
    }
    for (int bi = 0; bi < B; ++bi) {
        if (labels[bi] < 0 || labels[bi] >= C) {
            throw ShapeError("softmax_cross_entropy: label " + std::to_string(labels[bi]) +
                             " at batch index " + std::to_string(bi) + " is out of range [0," +
                             std::to_string(C) + ")");
        }
    }

    const real* xd = logits.data().data();
    std::vector<real> probs(logits.data().size());
    real loss = 0;
    for (int bi = 0; bi < B; ++bi) {
        const real* row = xd + static_cast<size_t>(bi) * C;
        real* prow = probs.data() + static_cast<size_t>(bi) * C;
        real mx = row[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
        real z = 0;
        for (int c = 0; c < C; ++c) {
            prow[c] = std::exp(row[c] - mx);
            z += prow[c];
        }
        for (int c = 0; c < C; ++c) prow[c] /= z;
        loss += std::log(z) + mx - row[labels[bi]];
    }
    loss /= static_cast<real>(B);

    auto xi = logits.impl();
    auto bwd = [xi, B, C, labels, p = std::move(probs)](detail::TensorImpl& o) {
        if (!xi->requires_grad) return;
        real* dx = detail::ensure_grad(*xi).data();
        const real g = o.grad[0] / static_cast<real>(B);
        for (int bi = 0; bi < B; ++bi) {
            const size_t base = static_cast<size_t>(bi) * C;
            for (int c = 0; c < C; ++c) {
                dx[base + c] += g * (p[base + c] - (c == labels[bi] ? real(1) : real(0)));
            }
        }
    };
    return make_from_op({1}, {loss}, {logits}, std::move(bwd));
}

Tensor l2_distance(const Tensor& a, const Tensor& b) {
    check_same_shape("l2_distance", a, b);
    if (a.ndim() != 2) throw ShapeError("l2_distance: inputs must be [B,D], got " + shape_str(a.shape()));
    const int B = a.dim(0), D = a.dim(1);
    const real* ad = a.data().data();
    const real* bd = b.data().data();
    std::vector<real> norms(static_cast<size_t>(B));
    real loss = 0;
    for (int bi = 0; bi < B; ++bi) {
        const size_t base = static_cast<size_t>(bi) * D;
        real s = 0;
        for (int d = 0; d < D; ++d) {
            const real diff = ad[base + d] - bd[base + d];
            s += diff * diff;
        }
        norms[static_cast<size_t>(bi)] = std::sqrt(s);
        loss += norms[static_cast<size_t>(bi)];
    }
    loss /= static_cast<real>(B);

    auto ai = a.impl();
    auto bim = b.impl();
    auto bwd = [ai, bim, B, D, n = std::move(norms)](detail::TensorImpl& o) {
        const real g = o.grad[0] / static_cast<real>(B);
        for (int bi = 0; bi < B; ++bi) {
            const real norm = n[static_cast<size_t>(bi)];
            if (norm <= real(0)) continue;  // subgradient 0 at coincident rows
            const real k = g / norm;
            const size_t base = static_cast<size_t>(bi) * D;
            if (ai->requires_grad) {
                auto& ga = detail::ensure_grad(*ai);
                for (int d = 0; d < D; ++d) {
                    ga[base + d] += k * (ai->data[base + d] - bim->data[base + d]);
                }
            }
            if (bim->requires_grad) {
                auto& gb = detail::ensure_grad(*bim);
                for (int d = 0; d < D; ++d) {
                    gb[base + d] -= k * (ai->data[base + d] - bim->data[base + d]);
                }
            }
        }
    };
    return make_from_op({1}, {loss}, {a, b}, std::move(bwd));
}

}  // namespace soundcil
