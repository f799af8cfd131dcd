// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qgnn/autodiff.hpp"
#include "qgnn/kernels.hpp"

#include <cmath>

namespace qgnn::ad {
namespace {

std::string shape_str(const Tensor &t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_tape(Var a, Var b) {
    if (a.tape() != b.tape()) {
        throw std::logic_error("vars recorded on different tapes");
    }
}

} // namespace

Var dense(Var x, Var weight, Var bias) {
    require_same_tape(x, weight);
    require_same_tape(x, bias);
    const Tensor &X = x.value();
    const Tensor &W = weight.value();
    const Tensor &B = bias.value();
    if (X.cols() != W.rows() || B.rows() != 1 || B.cols() != W.cols()) {
        throw ShapeError("dense: input " + shape_str(X) + ", weight " + shape_str(W) +
                         ", bias " + shape_str(B));
    }
    const auto &k = simd::active_kernels();
    const std::size_t n = X.rows();
    const std::size_t din = W.rows();
    const std::size_t dout = W.cols();
    Tensor Y(n, dout);
    for (std::size_t i = 0; i < n; ++i) {
        double *y = Y.row(i).data();
        const double *xi = X.row(i).data();
        std::copy(B.data(), B.data() + dout, y);
        for (std::size_t j = 0; j < din; ++j) {
            if (xi[j] != 0.0) {
                k.axpy(dout, xi[j], W.row(j).data(), y);
            }
        }
    }
    Tape &tape = *x.tape();
    return tape.push(std::move(Y), {x, weight, bias},
                     [x, weight, bias](Tape &t, const Tensor &, const Tensor &G) {
                         const auto &k = simd::active_kernels();
                         const Tensor &X = t.value(x);
                         const Tensor &W = t.value(weight);
                         const std::size_t n = X.rows();
                         const std::size_t din = W.rows();
                         const std::size_t dout = W.cols();
                         if (t.requires_grad(x)) {
                             Tensor &gx = t.grad_buffer(x);
                             for (std::size_t i = 0; i < n; ++i) {
                                 const double *g = G.row(i).data();
                                 double *gxi = gx.row(i).data();
                                 for (std::size_t j = 0; j < din; ++j) {
                                     gxi[j] += k.dot(dout, g, W.row(j).data());
                                 }
                             }
                         }
                         if (t.requires_grad(weight)) {
                             Tensor &gw = t.grad_buffer(weight);
                             for (std::size_t i = 0; i < n; ++i) {
                                 const double *g = G.row(i).data();
                                 const double *xi = X.row(i).data();
                                 for (std::size_t j = 0; j < din; ++j) {
                                     if (xi[j] != 0.0) {
                                         k.axpy(dout, xi[j], g, gw.row(j).data());
                                     }
                                 }
                             }
                         }
                         if (t.requires_grad(bias)) {
                             Tensor &gb = t.grad_buffer(bias);
                             for (std::size_t i = 0; i < n; ++i) {
                                 k.axpy(dout, 1.0, G.row(i).data(), gb.data());
                             }
                         }
                     });
}

Var tanh(Var x) {
    const Tensor &X = x.value();
    Tensor Y(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.size(); ++i) {
        Y.values()[i] = std::tanh(X.values()[i]);
    }
    return x.tape()->push(std::move(Y), {x}, [x](Tape &t, const Tensor &Y, const Tensor &G) {
        Tensor &gx = t.grad_buffer(x);
        for (std::size_t i = 0; i < Y.size(); ++i) {
            const double y = Y.values()[i];
            gx.values()[i] += G.values()[i] * (1.0 - y * y);
        }
    });
}

Var sigmoid(Var x) {
    const Tensor &X = x.value();
    Tensor Y(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double v = X.values()[i];
        // split on sign so exp never overflows
        Y.values()[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    return x.tape()->push(std::move(Y), {x}, [x](Tape &t, const Tensor &Y, const Tensor &G) {
        Tensor &gx = t.grad_buffer(x);
        for (std::size_t i = 0; i < Y.size(); ++i) {
            const double y = Y.values()[i];
            gx.values()[i] += G.values()[i] * y * (1.0 - y);
        }
    });
}

Var scale(Var x, double factor) {
    Tensor Y = x.value();
    for (double &v : Y.values()) {
        v *= factor;
    }
    return x.tape()->push(std::move(Y), {x},
                          [x, factor](Tape &t, const Tensor &, const Tensor &G) {
                              simd::active_kernels().axpy(G.size(), factor, G.data(),
                                                          t.grad_buffer(x).data());
                          });
}

Var add(Var a, Var b) {
    require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) {
        throw ShapeError("add: " + shape_str(a.value()) + " vs " + shape_str(b.value()));
    }
    Tensor Y = a.value();
    const auto bv = b.value().values();
    for (std::size_t i = 0; i < Y.size(); ++i) {
        Y.values()[i] += bv[i];
    }
    return a.tape()->push(std::move(Y), {a, b}, [a, b](Tape &t, const Tensor &, const Tensor &G) {
        for (Var v : {a, b}) {
            if (t.requires_grad(v)) {
                simd::active_kernels().axpy(G.size(), 1.0, G.data(), t.grad_buffer(v).data());
            }
        }
    });
}

Var mul(Var a, Var b) {
    require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) {
        throw ShapeError("mul: " + shape_str(a.value()) + " vs " + shape_str(b.value()));
    }
    Tensor Y = a.value();
    const auto bv = b.value().values();
    for (std::size_t i = 0; i < Y.size(); ++i) {
        Y.values()[i] *= bv[i];
    }
    return a.tape()->push(std::move(Y), {a, b}, [a, b](Tape &t, const Tensor &, const Tensor &G) {
        const auto av = t.value(a).values();
        const auto bv = t.value(b).values();
        if (t.requires_grad(a)) {
            auto ga = t.grad_buffer(a).values();
            for (std::size_t i = 0; i < ga.size(); ++i) {
                ga[i] += G.values()[i] * bv[i];
            }
        }
        if (t.requires_grad(b)) {
            auto gb = t.grad_buffer(b).values();
            for (std::size_t i = 0; i < gb.size(); ++i) {
                gb[i] += G.values()[i] * av[i];
            }
        }
    });
}

Var mul_rows(Var m, Var w) {
    require_same_tape(m, w);
    const Tensor &M = m.value();
    const Tensor &Wv = w.value();
    if (Wv.cols() != 1 || Wv.rows() != M.rows()) {
        throw ShapeError("mul_rows: matrix " + shape_str(M) + ", weights " + shape_str(Wv));
    }
    Tensor Y = M;
    for (std::size_t i = 0; i < Y.rows(); ++i) {
        for (double &v : Y.row(i)) {
            v *= Wv(i, 0);
        }
    }
    return m.tape()->push(std::move(Y), {m, w}, [m, w](Tape &t, const Tensor &, const Tensor &G) {
        const auto &k = simd::active_kernels();
        const Tensor &M = t.value(m);
        const Tensor &Wv = t.value(w);
        if (t.requires_grad(m)) {
            Tensor &gm = t.grad_buffer(m);
            for (std::size_t i = 0; i < M.rows(); ++i) {
                k.axpy(M.cols(), Wv(i, 0), G.row(i).data(), gm.row(i).data());
            }
        }
        if (t.requires_grad(w)) {
            Tensor &gw = t.grad_buffer(w);
            for (std::size_t i = 0; i < M.rows(); ++i) {
                gw(i, 0) += k.dot(M.cols(), G.row(i).data(), M.row(i).data());
            }
        }
    });
}

Var concat_cols(std::initializer_list<Var> parts) {
    return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var concat_cols(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ShapeError("concat_cols: no inputs");
    }
    const std::size_t n = parts.front().rows();
    std::size_t width = 0;
    for (const Var &p : parts) {
        require_same_tape(parts.front(), p);
        if (p.rows() != n) {
            throw ShapeError("concat_cols: row count mismatch");
        }
        width += p.cols();
    }
    Tensor Y(n, width);
    std::size_t offset = 0;
    for (const Var &p : parts) {
        const Tensor &P = p.value();
        for (std::size_t i = 0; i < n; ++i) {
            std::copy(P.row(i).begin(), P.row(i).end(), Y.row(i).begin() + static_cast<long>(offset));
        }
        offset += P.cols();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return parts.front().tape()->push(
        std::move(Y), parts, [inputs](Tape &t, const Tensor &, const Tensor &G) {
            std::size_t offset = 0;
            for (const Var &p : inputs) {
                const std::size_t w = t.value(p).cols();
                if (t.requires_grad(p)) {
                    Tensor &gp = t.grad_buffer(p);
                    for (std::size_t i = 0; i < G.rows(); ++i) {
                        const double *src = G.row(i).data() + offset;
                        double *dst = gp.row(i).data();
                        for (std::size_t c = 0; c < w; ++c) {
                            dst[c] += src[c];
                        }
                    }
                }
                offset += w;
            }
        });
}

Var gather_rows(Var x, std::span<const std::uint32_t> index) {
    const Tensor &X = x.value();
    Tensor Y(index.size(), X.cols());
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= X.rows()) {
            throw ShapeError("gather_rows: index out of range");
        }
        std::copy(X.row(index[k]).begin(), X.row(index[k]).end(), Y.row(k).begin());
    }
    std::vector<std::uint32_t> idx(index.begin(), index.end());
    return x.tape()->push(std::move(Y), {x},
                          [x, idx = std::move(idx)](Tape &t, const Tensor &, const Tensor &G) {
                              const auto &k = simd::active_kernels();
                              Tensor &gx = t.grad_buffer(x);
                              for (std::size_t e = 0; e < idx.size(); ++e) {
                                  k.axpy(G.cols(), 1.0, G.row(e).data(), gx.row(idx[e]).data());
                              }
                          });
}

Var scatter_rows(Var m, std::span<const std::uint32_t> index, std::size_t n_rows) {
    const Tensor &M = m.value();
    if (index.size() != M.rows()) {
        throw ShapeError("scatter_rows: index length does not match rows");
    }
    const auto &k = simd::active_kernels();
    Tensor Y(n_rows, M.cols());
    for (std::size_t e = 0; e < index.size(); ++e) {
        if (index[e] >= n_rows) {
            throw ShapeError("scatter_rows: index out of range");
        }
        k.axpy(M.cols(), 1.0, M.row(e).data(), Y.row(index[e]).data());
    }
    std::vector<std::uint32_t> idx(index.begin(), index.end());
    return m.tape()->push(std::move(Y), {m},
                          [m, idx = std::move(idx)](Tape &t, const Tensor &, const Tensor &G) {
                              const auto &k = simd::active_kernels();
                              Tensor &gm = t.grad_buffer(m);
                              for (std::size_t e = 0; e < idx.size(); ++e) {
                                  k.axpy(G.cols(), 1.0, G.row(idx[e]).data(), gm.row(e).data());
                              }
                          });
}

Var sum(Var x) {
    double acc = 0.0;
    for (double v : x.value().values()) {
        acc += v;
    }
    return x.tape()->push(Tensor(1, 1, acc), {x}, [x](Tape &t, const Tensor &, const Tensor &G) {
        for (double &g : t.grad_buffer(x).values()) {
            g += G(0, 0);
        }
    });
}

Var mean(Var x) {
    const std::size_t n = x.value().size();
    if (n == 0) {
        throw ShapeError("mean of an empty tensor");
    }
    return scale(sum(x), 1.0 / static_cast<double>(n));
}

} // namespace qgnn::ad
