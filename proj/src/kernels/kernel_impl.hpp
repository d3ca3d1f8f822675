#pragma once

// Array-level kernel loops, templated over the lane type. Any elements left
// over from the vector stride are processed with the scalar lane, which runs
// the identical algorithm, so backends agree bit for bit on every element.

#include <algorithm>
#include <cstddef>

#include "lanes.hpp"

namespace qkdrec::kernels::detail {

template <class L>
void tanh_half_arr(double *dst, const double *x, size_t n) {
    size_t i = 0;
    for (; i + L::width <= n; i += L::width) {
        L::store(dst + i, tanh_half_core<L>(L::load(x + i)));
    }
    for (; i < n; ++i) {
        dst[i] = tanh_half_core<ScalarLane>(x[i]);
    }
}

template <class L>
void atanh2_clip_arr(double *dst, const double *y, size_t n, double clip) {
    const auto vclip = L::set1(clip);
    size_t i = 0;
    for (; i + L::width <= n; i += L::width) {
        L::store(dst + i, atanh2_clip_core<L>(L::load(y + i), vclip));
    }
    for (; i < n; ++i) {
        dst[i] = atanh2_clip_core<ScalarLane>(y[i], clip);
    }
}

template <class L>
void mul_arr(double *dst, const double *a, const double *b, size_t n) {
    size_t i = 0;
    for (; i + L::width <= n; i += L::width) {
        L::store(dst + i, L::mul(L::load(a + i), L::load(b + i)));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] * b[i];
    }
}

template <class L>
void add_arr(double *dst, const double *a, const double *b, size_t n) {
    size_t i = 0;
    for (; i + L::width <= n; i += L::width) {
        L::store(dst + i, L::add(L::load(a + i), L::load(b + i)));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] + b[i];
    }
}

template <class L>
void add_clip_arr(double *dst, const double *a, const double *b, size_t n, double clip) {
    const auto vclip = L::set1(clip);
    const auto vnclip = L::set1(-clip);
    size_t i = 0;
    for (; i + L::width <= n; i += L::width) {
        L::store(dst + i, add_clip_core<L>(L::load(a + i), L::load(b + i), vclip, vnclip));
    }
    for (; i < n; ++i) {
        dst[i] = add_clip_core<ScalarLane>(a[i], b[i], clip, -clip);
    }
}

// Exclusive products/sums down the rows of a row-major plane, as a prefix
// pass followed by a suffix pass. Columns are independent, so chunking only
// bounds the stack scratch; it cannot change any value.
inline constexpr size_t kPlaneChunk = 1024;

template <class L>
void plane_excl_product_arr(double *out, const double *in, size_t rows, size_t cols) {
    double sfx[kPlaneChunk];
    for (size_t c0 = 0; c0 < cols; c0 += kPlaneChunk) {
        const size_t cn = std::min(kPlaneChunk, cols - c0);
        std::fill(out + c0, out + c0 + cn, 1.0);
        for (size_t r = 1; r < rows; ++r) {
            mul_arr<L>(out + r * cols + c0, out + (r - 1) * cols + c0, in + (r - 1) * cols + c0,
                       cn);
        }
        std::fill(sfx, sfx + cn, 1.0);
        for (size_t r = rows; r-- > 0;) {
            mul_arr<L>(out + r * cols + c0, out + r * cols + c0, sfx, cn);
            if (r > 0) {
                mul_arr<L>(sfx, sfx, in + r * cols + c0, cn);
            }
        }
    }
}

template <class L>
void plane_excl_sum_arr(double *out, const double *in, size_t rows, size_t cols) {
    double sfx[kPlaneChunk];
    for (size_t c0 = 0; c0 < cols; c0 += kPlaneChunk) {
        const size_t cn = std::min(kPlaneChunk, cols - c0);
        std::fill(out + c0, out + c0 + cn, 0.0);
        for (size_t r = 1; r < rows; ++r) {
            add_arr<L>(out + r * cols + c0, out + (r - 1) * cols + c0, in + (r - 1) * cols + c0,
                       cn);
        }
        std::fill(sfx, sfx + cn, 0.0);
        for (size_t r = rows; r-- > 0;) {
            add_arr<L>(out + r * cols + c0, out + r * cols + c0, sfx, cn);
            if (r > 0) {
                add_arr<L>(sfx, sfx, in + r * cols + c0, cn);
            }
        }
    }
}

template <class L>
void plane_sum_arr(double *out, const double *in, size_t rows, size_t cols) {
    std::fill(out, out + cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        add_arr<L>(out, out, in + r * cols, cols);
    }
}

}  // namespace qkdrec::kernels::detail
