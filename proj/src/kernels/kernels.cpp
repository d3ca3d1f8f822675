#include "qkdrec/kernels.hpp"

#include <atomic>

#include "kernel_impl.hpp"

namespace qkdrec::kernels {

namespace {

using detail::ScalarLane;

void xor_words_scalar(uint64_t *dst, const uint64_t *a, const uint64_t *b, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        dst[i] = a[i] ^ b[i];
    }
}

uint64_t popcount_words_scalar(const uint64_t *w, size_t n) {
    uint64_t total = 0;
    for (size_t i = 0; i < n; ++i) {
        total += static_cast<uint64_t>(__builtin_popcountll(w[i]));
    }
    return total;
}

const KernelTable kScalarTable = {
    &xor_words_scalar,
    &popcount_words_scalar,
    &detail::tanh_half_arr<ScalarLane>,
    &detail::atanh2_clip_arr<ScalarLane>,
    &detail::mul_arr<ScalarLane>,
    &detail::add_clip_arr<ScalarLane>,
    &detail::plane_excl_product_arr<ScalarLane>,
    &detail::plane_excl_sum_arr<ScalarLane>,
    &detail::plane_sum_arr<ScalarLane>,
    "scalar",
};

std::atomic<const KernelTable *> g_active{nullptr};

const KernelTable *pick_default() {
    if (const KernelTable *t = avx2_table()) {
        return t;
    }
    return &kScalarTable;
}

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable *avx2_table_impl();  // kernels_avx2.cpp, compiled with -mavx2 -mfma

const KernelTable *avx2_table() {
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return avx2_table_impl();
    }
    return nullptr;
}
#else
const KernelTable *avx2_table() { return nullptr; }
#endif

const KernelTable &scalar_table() { return kScalarTable; }

const KernelTable &active() {
    const KernelTable *t = g_active.load(std::memory_order_relaxed);
    if (t == nullptr) {
        t = pick_default();
        g_active.store(t, std::memory_order_relaxed);
    }
    return *t;
}

bool force_backend(const std::string &name) {
    if (name == "auto") {
        g_active.store(pick_default(), std::memory_order_relaxed);
        return true;
    }
    if (name == "scalar") {
        g_active.store(&kScalarTable, std::memory_order_relaxed);
        return true;
    }
    if (name == "avx2") {
        if (const KernelTable *t = avx2_table()) {
            g_active.store(t, std::memory_order_relaxed);
            return true;
        }
        return false;
    }
    return false;
}

}  // namespace qkdrec::kernels
