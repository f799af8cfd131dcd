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

#include <cstdlib>
#include <string_view>

namespace qgnn::simd {

#ifdef QGNN_HAVE_AVX2_TABLE
const KernelTable *avx2_kernels_impl();
#endif

const KernelTable *avx2_kernels() {
#ifdef QGNN_HAVE_AVX2_TABLE
    return avx2_kernels_impl();
#else
    return nullptr;
#endif
}

bool cpu_supports_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable &select_kernels() {
    const KernelTable *avx2 = avx2_kernels();
    const bool avx2_ok = avx2 != nullptr && cpu_supports_avx2();
    if (const char *env = std::getenv("QGNN_KERNELS")) {
        const std::string_view want{env};
        if (want == "scalar") {
            return scalar_kernels();
        }
        if (want == "avx2" && avx2_ok) {
            return *avx2;
        }
    }
    return avx2_ok ? *avx2 : scalar_kernels();
}

} // namespace

const KernelTable &active_kernels() {
    static const KernelTable &table = select_kernels();
    return table;
}

} // namespace qgnn::simd
