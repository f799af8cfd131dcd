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
/**
 * @file
 * Flat numeric kernels used by the dense layers and the statevector
 * simulator. Each kernel has a scalar reference implementation and an
 * optional AVX2 variant; the table is chosen once at startup.
 */
#pragma once

#include <cstddef>


namespace qgnn::simd {

struct KernelTable {
    const char *name;

    /// y[i] += a * x[i]
    void (*axpy)(std::size_t n, double a, const double *x, double *y);

    double (*dot)(std::size_t n, const double *x, const double *y);

    /**
     * Apply the real rotation [[c, -s], [s, c]] to every amplitude pair
     * (i, i + stride) of an interleaved complex array with `dim` amplitudes.
     * `stride` is a power of two smaller than `dim`.
     */
    void (*rotate_pairs)(std::size_t dim, std::size_t stride, double c,
                         double s, double *amps);

    /// x[i] *= d[i]
    void (*mul_elementwise)(std::size_t n, const double *d, double *x);

    /// out[k] = re[k]^2 + im[k]^2 for interleaved complex input.
    void (*abs2)(std::size_t dim, const double *amps, double *out);
};

const KernelTable &scalar_kernels();

/// Returns nullptr when the AVX2 table was not compiled in.
const KernelTable *avx2_kernels();

bool cpu_supports_avx2();

/**
 * The table used by the library. Honors QGNN_KERNELS=scalar|avx2 in the
 * environment; otherwise picks AVX2 when both compiled and supported.
 */
const KernelTable &active_kernels();

} // namespace qgnn::simd
