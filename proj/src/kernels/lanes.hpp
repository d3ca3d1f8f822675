#pragma once

// Element-level kernel algorithms shared by the scalar reference and the SIMD
// variants. Each algorithm is a template over a Lane type; every operation in
// the lane interface is either exact (bit logic, blends, min/max) or correctly
// rounded (+, -, *, /, fma), so instantiations produce bit-identical results
// lane by lane. Keep all arithmetic inside these templates: adding a bare
// a * b + c here (instead of L::fma / separate ops) would let the compiler
// contract differently per TU and break the equivalence guarantee.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace qkdrec::kernels::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // high bits of ln 2
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kInvLn2 = 1.44269504088896338700e+00;
inline constexpr double kExpSmallCut = 0.34657359027997264;  // ln(2)/2
inline constexpr double kLogSmallCut = 0.41421356237309503;  // sqrt(2)-1
inline constexpr double kSqrt2 = 1.41421356237309515;        // nextafter(sqrt(2))
inline constexpr double kRoundMagic = 0x1.0p52;
inline constexpr double kTanhArgMax = 50.0;
inline constexpr double kHugeOdds = 1e300;

// expm1(r)/r = sum r^k / (k+1)!, k = 0..13
inline constexpr double kExpm1C[14] = {
    1.0,
    1.0 / 2,
    1.0 / 6,
    1.0 / 24,
    1.0 / 120,
    1.0 / 720,
    1.0 / 5040,
    1.0 / 40320,
    1.0 / 362880,
    1.0 / 3628800,
    1.0 / 39916800,
    1.0 / 479001600,
    1.0 / 6227020800.0,
    1.0 / 87178291200.0,
};

// 2*atanh(w)/w = sum 2/(2k+1) * (w^2)^k, k = 0..9
inline constexpr double kAtanhC[10] = {
    2.0,
    2.0 / 3,
    2.0 / 5,
    2.0 / 7,
    2.0 / 9,
    2.0 / 11,
    2.0 / 13,
    2.0 / 15,
    2.0 / 17,
    2.0 / 19,
};

struct ScalarLane {
    using V = double;
    static constexpr size_t width = 1;

    static V load(const double *p) { return *p; }
    static void store(double *p, V v) { *p = v; }
    static V set1(double v) { return v; }
    static V add(V a, V b) { return a + b; }
    static V sub(V a, V b) { return a - b; }
    static V mul(V a, V b) { return a * b; }
    static V div(V a, V b) { return a / b; }
    static V fma(V a, V b, V c) { return std::fma(a, b, c); }
    static V min(V a, V b) { return a < b ? a : b; }
    static V max(V a, V b) { return a > b ? a : b; }
    static V abs(V a) { return std::bit_cast<double>(std::bit_cast<uint64_t>(a) & ~(1ULL << 63)); }
    // (a < b) ? x : y
    static V blend_lt(V a, V b, V x, V y) { return a < b ? x : y; }
    static V copy_sign_of(V mag, V src) {
        uint64_t m = std::bit_cast<uint64_t>(mag) & ~(1ULL << 63);
        uint64_t s = std::bit_cast<uint64_t>(src) & (1ULL << 63);
        return std::bit_cast<double>(m | s);
    }
    // Round-to-nearest-even for v in [0, 2^51).
    static V round_nonneg(V v) { return (v + kRoundMagic) - kRoundMagic; }
    // x * 2^k for integral k; result must stay normal.
    static V scale_pow2(V x, V k) {
        auto ki = static_cast<int64_t>(k);
        return std::bit_cast<double>(std::bit_cast<int64_t>(x) + (ki << 52));
    }
    // z normal positive -> mantissa in (sqrt2/2, sqrt2], exponent as double.
    static void split_exp(V z, V &mant, V &expd) {
        uint64_t b = std::bit_cast<uint64_t>(z);
        auto e = static_cast<int64_t>((b >> 52) & 0x7FF) - 1023;
        double m = std::bit_cast<double>((b & 0x000FFFFFFFFFFFFFULL) | 0x3FF0000000000000ULL);
        if (m > kSqrt2) {
            m *= 0.5;
            e += 1;
        }
        mant = m;
        expd = static_cast<double>(e);
    }
};

#if defined(__AVX2__) && defined(__FMA__)
struct Avx2Lane {
    using V = __m256d;
    static constexpr size_t width = 4;

    static V load(const double *p) { return _mm256_loadu_pd(p); }
    static void store(double *p, V v) { _mm256_storeu_pd(p, v); }
    static V set1(double v) { return _mm256_set1_pd(v); }
    static V add(V a, V b) { return _mm256_add_pd(a, b); }
    static V sub(V a, V b) { return _mm256_sub_pd(a, b); }
    static V mul(V a, V b) { return _mm256_mul_pd(a, b); }
    static V div(V a, V b) { return _mm256_div_pd(a, b); }
    static V fma(V a, V b, V c) { return _mm256_fmadd_pd(a, b, c); }
    static V min(V a, V b) { return _mm256_min_pd(a, b); }  // (a < b) ? a : b
    static V max(V a, V b) { return _mm256_max_pd(a, b); }  // (a > b) ? a : b
    static V abs(V a) {
        return _mm256_and_pd(a, _mm256_castsi256_pd(_mm256_set1_epi64x(~(1LL << 63))));
    }
    static V blend_lt(V a, V b, V x, V y) {
        return _mm256_blendv_pd(y, x, _mm256_cmp_pd(a, b, _CMP_LT_OQ));
    }
    static V copy_sign_of(V mag, V src) {
        const V sign = _mm256_castsi256_pd(_mm256_set1_epi64x(1LL << 63));
        return _mm256_or_pd(_mm256_andnot_pd(sign, mag), _mm256_and_pd(sign, src));
    }
    static V round_nonneg(V v) {
        const V magic = set1(kRoundMagic);
        return sub(add(v, magic), magic);
    }
    static V scale_pow2(V x, V k) {
        __m128i k32 = _mm256_cvtpd_epi32(k);
        __m256i k64 = _mm256_cvtepi32_epi64(k32);
        return _mm256_castsi256_pd(
            _mm256_add_epi64(_mm256_castpd_si256(x), _mm256_slli_epi64(k64, 52)));
    }
    static void split_exp(V z, V &mant, V &expd) {
        __m256i b = _mm256_castpd_si256(z);
        __m256i eb = _mm256_and_si256(_mm256_srli_epi64(b, 52), _mm256_set1_epi64x(0x7FF));
        // int64 -> double for 0 <= eb < 2^31 via the 2^52 magic trick
        __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
        V e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(eb, magic)),
                            _mm256_set1_pd(0x1.0p52));
        e = sub(e, set1(1023.0));
        V m = _mm256_castsi256_pd(_mm256_or_si256(
            _mm256_and_si256(b, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
            _mm256_set1_epi64x(0x3FF0000000000000LL)));
        V too_big = _mm256_cmp_pd(m, set1(kSqrt2), _CMP_GT_OQ);
        mant = _mm256_blendv_pd(m, mul(m, set1(0.5)), too_big);
        expd = _mm256_blendv_pd(e, add(e, set1(1.0)), too_big);
    }
};
#endif

// tanh(x/2) = expm1(a) / (expm1(a) + 2) on a = |x| clamped to [0, 50],
// sign restored at the end. Reduction a = k*ln2 + r with k forced to zero
// below the small-argument cut so tiny inputs keep full relative precision.
template <class L>
inline typename L::V tanh_half_core(typename L::V x) {
    using V = typename L::V;
    const V zero = L::set1(0.0);
    const V one = L::set1(1.0);
    const V two = L::set1(2.0);

    V a = L::min(L::abs(x), L::set1(kTanhArgMax));
    V kfull = L::round_nonneg(L::mul(a, L::set1(kInvLn2)));
    V k = L::blend_lt(a, L::set1(kExpSmallCut), zero, kfull);
    V r = L::fma(k, L::set1(-kLn2Hi), a);
    r = L::fma(k, L::set1(-kLn2Lo), r);

    V q = L::set1(kExpm1C[13]);
    for (int i = 12; i >= 0; --i) {
        q = L::fma(q, r, L::set1(kExpm1C[i]));
    }
    V p = L::mul(r, q);  // expm1(r)

    V em_big = L::sub(L::scale_pow2(L::add(one, p), k), one);
    V em = L::blend_lt(a, L::set1(kExpSmallCut), p, em_big);
    V t = L::div(em, L::add(em, two));
    return L::copy_sign_of(t, x);
}

// clamp(2*atanh(y), -clip, clip) via log1p(2|y| / (1-|y|)).
template <class L>
inline typename L::V atanh2_clip_core(typename L::V y, typename L::V clip) {
    using V = typename L::V;
    const V one = L::set1(1.0);
    const V two = L::set1(2.0);

    V a = L::abs(y);
    V denom = L::sub(one, a);
    V u = L::div(L::mul(two, a), denom);
    u = L::min(u, L::set1(kHugeOdds));  // saturate the y == 1 pole

    V small_w = L::div(u, L::add(two, u));
    V z = L::add(one, u);
    V mant, expd;
    L::split_exp(z, mant, expd);
    V big_w = L::div(L::sub(mant, one), L::add(mant, one));

    V cut = L::set1(kLogSmallCut);
    V w = L::blend_lt(u, cut, small_w, big_w);
    V k = L::blend_lt(u, cut, L::set1(0.0), expd);

    V w2 = L::mul(w, w);
    V s = L::set1(kAtanhC[9]);
    for (int i = 8; i >= 0; --i) {
        s = L::fma(s, w2, L::set1(kAtanhC[i]));
    }
    V res = L::mul(w, s);
    res = L::fma(k, L::set1(kLn2Lo), res);
    res = L::fma(k, L::set1(kLn2Hi), res);
    res = L::min(res, clip);
    return L::copy_sign_of(res, y);
}

template <class L>
inline typename L::V add_clip_core(typename L::V a, typename L::V b, typename L::V clip,
                                   typename L::V nclip) {
    return L::min(L::max(L::add(a, b), nclip), clip);
}

}  // namespace qkdrec::kernels::detail
