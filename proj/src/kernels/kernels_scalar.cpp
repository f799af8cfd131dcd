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
#include "qgnn/kernels.hpp"

namespace qgnn::simd {
namespace {

void axpy_scalar(std::size_t n, double a, const double *x, double *y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

double dot_scalar(std::size_t n, const double *x, const double *y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

void rotate_pairs_scalar(std::size_t dim, std::size_t stride, double c,
                         double s, double *amps) {
    const std::size_t run = 2 * stride;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        double *lo = amps + 2 * base;
        double *hi = lo + run;
        for (std::size_t k = 0; k < run; ++k) {
            const double a0 = lo[k];
            const double a1 = hi[k];
            lo[k] = c * a0 - s * a1;
            hi[k] = s * a0 + c * a1;
        }
    }
}

void mul_elementwise_scalar(std::size_t n, const double *d, double *x) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= d[i];
    }
}

void abs2_scalar(std::size_t dim, const double *amps, double *out) {
    for (std::size_t k = 0; k < dim; ++k) {
        const double re = amps[2 * k];
        const double im = amps[2 * k + 1];
        out[k] = re * re + im * im;
    }
}

} // namespace

const KernelTable &scalar_kernels() {
    static const KernelTable table{"scalar",          axpy_scalar,
                                   dot_scalar,        rotate_pairs_scalar,
                                   mul_elementwise_scalar, abs2_scalar};
    return table;
}

} // namespace qgnn::simd
