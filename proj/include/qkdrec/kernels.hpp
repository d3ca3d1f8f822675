#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace qkdrec::kernels {

// Data-parallel inner loops used by the decoders, provided as scalar
// reference implementations plus SIMD variants selected at runtime.
// Scalar and SIMD variants execute the same operations in the same order,
// so their results are bit-identical; the equivalence tests assert that.
//
// Plane layout: a (rows x cols) matrix stored row-major. The belief
// propagation engine keeps one row per node slot (check slot j or variable
// slot i), so the exclusive product / sum over slots vectorizes across the
// cols dimension. Callers pad cols with the operation's identity element.
struct KernelTable {
    // dst = a ^ b over nwords 64-bit words.
    void (*xor_words)(uint64_t *dst, const uint64_t *a, const uint64_t *b, size_t nwords);
    // Total popcount over nwords words.
    uint64_t (*popcount_words)(const uint64_t *w, size_t nwords);
    // dst[i] = tanh(x[i] / 2). Inputs are finite; |x| is clamped to 50.
    void (*tanh_half)(double *dst, const double *x, size_t n);
    // dst[i] = clamp(2 * atanh(y[i]), -clip, clip). |y| <= 1 expected.
    void (*atanh2_clip)(double *dst, const double *y, size_t n, double clip);
    // dst[i] = a[i] * b[i].
    void (*mul)(double *dst, const double *a, const double *b, size_t n);
    // dst[i] = clamp(a[i] + b[i], -clip, clip).
    void (*add_clip)(double *dst, const double *a, const double *b, size_t n, double clip);
    // out[r][c] = prod over r' != r of in[r'][c]; identity pad = 1.0.
    void (*plane_excl_product)(double *out, const double *in, size_t rows, size_t cols);
    // out[r][c] = sum over r' != r of in[r'][c]; identity pad = 0.0.
    void (*plane_excl_sum)(double *out, const double *in, size_t rows, size_t cols);
    // out[c] = sum over r of in[r][c].
    void (*plane_sum)(double *out, const double *in, size_t rows, size_t cols);

    const char *name;
};

// Active table (runtime CPU dispatch on first use).
const KernelTable &active();

// Specific backends, for equivalence tests and the --kernel CLI override.
const KernelTable &scalar_table();
const KernelTable *avx2_table();  // nullptr when unsupported by the CPU/build

// Force a backend by name ("auto", "scalar", "avx2"). Returns false if the
// backend is unavailable. Not thread-safe with concurrent kernel use.
bool force_backend(const std::string &name);

}  // namespace qkdrec::kernels
