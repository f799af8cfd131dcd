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
// Compiled with -mavx2 -mfma in isolation. Nothing here may pull in inline
// library code that the linker could hand to non-AVX2 callers, so only
// intrinsics and the plain-C kernel table header are included.
#include "qgnn/kernels.hpp"

#include <immintrin.h>

namespace qgnn::simd {
namespace {

void axpy_avx2(std::size_t n, double a, const double *x, double *y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i) {
        y[i] += a * x[i];
    }
}

double dot_avx2(std::size_t n, const double *x, const double *y) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                               _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    const __m128d lo = _mm256_castpd256_pd128(acc0);
    const __m128d hi = _mm256_extractf128_pd(acc0, 1);
    const __m128d sum2 = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
    for (; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

void rotate_pairs_avx2(std::size_t dim, std::size_t stride, double c, double s,
                       double *amps) {
    const std::size_t run = 2 * stride;
    if (run < 4) {
        // stride 1: each half is a single complex number
        const __m128d vc = _mm_set1_pd(c);
        const __m128d vs = _mm_set1_pd(s);
        for (std::size_t base = 0; base < dim; base += 2) {
            double *lo = amps + 2 * base;
            const __m128d a0 = _mm_loadu_pd(lo);
            const __m128d a1 = _mm_loadu_pd(lo + 2);
            _mm_storeu_pd(lo, _mm_sub_pd(_mm_mul_pd(vc, a0), _mm_mul_pd(vs, a1)));
            _mm_storeu_pd(lo + 2, _mm_add_pd(_mm_mul_pd(vs, a0), _mm_mul_pd(vc, a1)));
        }
        return;
    }
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        double *lo = amps + 2 * base;
        double *hi = lo + run;
        for (std::size_t k = 0; k < run; k += 4) {
            const __m256d a0 = _mm256_loadu_pd(lo + k);
            const __m256d a1 = _mm256_loadu_pd(hi + k);
            _mm256_storeu_pd(lo + k,
                             _mm256_sub_pd(_mm256_mul_pd(vc, a0), _mm256_mul_pd(vs, a1)));
            _mm256_storeu_pd(hi + k,
                             _mm256_add_pd(_mm256_mul_pd(vs, a0), _mm256_mul_pd(vc, a1)));
        }
    }
}

void mul_elementwise_avx2(std::size_t n, const double *d, double *x) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i,
                         _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(d + i)));
    }
    for (; i < n; ++i) {
        x[i] *= d[i];
    }
}

void abs2_avx2(std::size_t dim, const double *amps, double *out) {
    std::size_t k = 0;
    for (; k + 4 <= dim; k += 4) {
        // two 256-bit loads hold four (re, im) pairs
        const __m256d p0 = _mm256_loadu_pd(amps + 2 * k);
        const __m256d p1 = _mm256_loadu_pd(amps + 2 * k + 4);
        const __m256d sq0 = _mm256_mul_pd(p0, p0);
        const __m256d sq1 = _mm256_mul_pd(p1, p1);
        // hadd gives (k0, k2, k1, k3); permute back to (k0, k1, k2, k3)
        const __m256d h = _mm256_hadd_pd(sq0, sq1);
        _mm256_storeu_pd(out + k, _mm256_permute4x64_pd(h, 0xD8));
    }
    for (; k < dim; ++k) {
        const double re = amps[2 * k];
        const double im = amps[2 * k + 1];
        out[k] = re * re + im * im;
    }
}

const KernelTable kAvx2Table{"avx2",          axpy_avx2,
                             dot_avx2,        rotate_pairs_avx2,
                             mul_elementwise_avx2, abs2_avx2};

} // namespace

const KernelTable *avx2_kernels_impl() { return &kAvx2Table; }

} // namespace qgnn::simd
