// AVX2 + FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; nothing here runs unless the dispatcher checked CPUID.

#include "qkdrec/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include "kernel_impl.hpp"

namespace qkdrec::kernels {

namespace {

using detail::Avx2Lane;

void xor_words_avx2(uint64_t *dst, const uint64_t *a, const uint64_t *b, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i), _mm256_xor_si256(va, vb));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] ^ b[i];
    }
}

// Nibble-LUT popcount (pshufb), accumulated with psadbw.
uint64_t popcount_words_avx2(const uint64_t *w, size_t n) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1,
                                         2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0F);
    __m256i acc = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(w + i));
        __m256i lo = _mm256_and_si256(v, low_mask);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi32(v, 4), low_mask);
        __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i *>(lanes), acc);
    uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        total += static_cast<uint64_t>(__builtin_popcountll(w[i]));
    }
    return total;
}

const KernelTable kAvx2Table = {
    &xor_words_avx2,
    &popcount_words_avx2,
    &detail::tanh_half_arr<Avx2Lane>,
    &detail::atanh2_clip_arr<Avx2Lane>,
    &detail::mul_arr<Avx2Lane>,
    &detail::add_clip_arr<Avx2Lane>,
    &detail::plane_excl_product_arr<Avx2Lane>,
    &detail::plane_excl_sum_arr<Avx2Lane>,
    &detail::plane_sum_arr<Avx2Lane>,
    "avx2",
};

}  // namespace

const KernelTable *avx2_table_impl() { return &kAvx2Table; }

}  // namespace qkdrec::kernels

#else

namespace qkdrec::kernels {
const KernelTable *avx2_table_impl() { return nullptr; }
}  // namespace qkdrec::kernels

#endif
