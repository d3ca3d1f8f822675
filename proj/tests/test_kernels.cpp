#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qkdrec/bits.hpp"
#include "qkdrec/kernels.hpp"
#include "qkdrec/rng.hpp"

using namespace qkdrec;

namespace {

std::vector<double> random_doubles(Rng &rng, size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = lo + (hi - lo) * rng.next_double();
    }
    return v;
}

}  // namespace

TEST_CASE("tanh_half matches libm within 1e-14 relative") {
    const auto &k = kernels::scalar_table();
    Rng rng(11);
    auto xs = random_doubles(rng, 4003, -30.0, 30.0);
    xs.push_back(0.0);
    xs.push_back(1e-300);
    xs.push_back(-1e-300);
    xs.push_back(1e-18);
    xs.push_back(25.0);
    xs.push_back(-25.0);
    xs.push_back(49.9);
    xs.push_back(120.0);  // clamps to 50
    std::vector<double> out(xs.size());
    k.tanh_half(out.data(), xs.data(), xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double ref = std::tanh(std::min(std::max(xs[i], -50.0), 50.0) / 2.0);
        const double tol = 1e-14 * std::max(1e-30, std::abs(ref));
        CHECK(std::abs(out[i] - ref) <= tol);
    }
}

TEST_CASE("atanh2_clip matches libm within 1e-13 relative") {
    const auto &k = kernels::scalar_table();
    Rng rng(12);
    auto ys = random_doubles(rng, 4003, -0.999999, 0.999999);
    ys.push_back(0.0);
    ys.push_back(1e-300);
    ys.push_back(0.5);
    ys.push_back(-0.5);
    ys.push_back(1.0);   // pole -> clip
    ys.push_back(-1.0);  // pole -> clip
    const double clip = 25.0;
    std::vector<double> out(ys.size());
    k.atanh2_clip(out.data(), ys.data(), ys.size(), clip);
    for (size_t i = 0; i < ys.size(); ++i) {
        double ref = 2.0 * std::atanh(ys[i]);
        ref = std::min(std::max(ref, -clip), clip);
        const double tol = 1e-13 * std::max(1e-30, std::abs(ref));
        CHECK(std::abs(out[i] - ref) <= tol);
    }
}

TEST_CASE("plane exclusive product/sum match the naive reference") {
    const auto &k = kernels::scalar_table();
    Rng rng(13);
    const size_t rows = 7;
    const size_t cols = 1033;  // exercises the chunk boundary
    auto in = random_doubles(rng, rows * cols, 0.1, 1.9);
    std::vector<double> prod(rows * cols);
    std::vector<double> sum(rows * cols);
    std::vector<double> total(cols);
    k.plane_excl_product(prod.data(), in.data(), rows, cols);
    k.plane_excl_sum(sum.data(), in.data(), rows, cols);
    k.plane_sum(total.data(), in.data(), rows, cols);
    for (size_t c = 0; c < cols; c += 97) {
        for (size_t r = 0; r < rows; ++r) {
            double pref = 1.0;
            double sref = 0.0;
            for (size_t r2 = 0; r2 < rows; ++r2) {
                if (r2 != r) {
                    pref *= in[r2 * cols + c];
                    sref += in[r2 * cols + c];
                }
            }
            CHECK(prod[r * cols + c] == doctest::Approx(pref).epsilon(1e-12));
            CHECK(sum[r * cols + c] == doctest::Approx(sref).epsilon(1e-12));
        }
        double tref = 0.0;
        for (size_t r2 = 0; r2 < rows; ++r2) {
            tref += in[r2 * cols + c];
        }
        CHECK(total[c] == doctest::Approx(tref).epsilon(1e-12));
    }
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference") {
    const auto *simd = kernels::avx2_table();
    if (simd == nullptr) {
        MESSAGE("AVX2 unavailable on this host; equivalence checked scalar-vs-scalar only");
        return;
    }
    const auto &sc = kernels::scalar_table();
    Rng rng(14);

    SUBCASE("elementwise math") {
        for (size_t n : {size_t{1}, size_t{3}, size_t{4}, size_t{257}, size_t{8192}}) {
            auto x = random_doubles(rng, n, -60.0, 60.0);
            std::vector<double> a(n);
            std::vector<double> b(n);
            sc.tanh_half(a.data(), x.data(), n);
            simd->tanh_half(b.data(), x.data(), n);
            CHECK(a == b);

            auto y = random_doubles(rng, n, -1.0, 1.0);
            sc.atanh2_clip(a.data(), y.data(), n, 25.0);
            simd->atanh2_clip(b.data(), y.data(), n, 25.0);
            CHECK(a == b);

            auto u = random_doubles(rng, n, -100.0, 100.0);
            auto v = random_doubles(rng, n, -100.0, 100.0);
            sc.mul(a.data(), u.data(), v.data(), n);
            simd->mul(b.data(), u.data(), v.data(), n);
            CHECK(a == b);

            sc.add_clip(a.data(), u.data(), v.data(), n, 25.0);
            simd->add_clip(b.data(), u.data(), v.data(), n, 25.0);
            CHECK(a == b);
        }
    }

    SUBCASE("plane passes") {
        for (size_t rows : {size_t{2}, size_t{6}, size_t{12}}) {
            for (size_t cols : {size_t{5}, size_t{1024}, size_t{2000}}) {
                auto in = random_doubles(rng, rows * cols, -1.0, 1.0);
                std::vector<double> a(rows * cols);
                std::vector<double> b(rows * cols);
                sc.plane_excl_product(a.data(), in.data(), rows, cols);
                simd->plane_excl_product(b.data(), in.data(), rows, cols);
                CHECK(a == b);
                sc.plane_excl_sum(a.data(), in.data(), rows, cols);
                simd->plane_excl_sum(b.data(), in.data(), rows, cols);
                CHECK(a == b);
                std::vector<double> ta(cols);
                std::vector<double> tb(cols);
                sc.plane_sum(ta.data(), in.data(), rows, cols);
                simd->plane_sum(tb.data(), in.data(), rows, cols);
                CHECK(ta == tb);
            }
        }
    }

    SUBCASE("bit ops") {
        for (size_t n : {size_t{1}, size_t{4}, size_t{129}}) {
            std::vector<uint64_t> u(n);
            std::vector<uint64_t> v(n);
            for (size_t i = 0; i < n; ++i) {
                u[i] = rng.next_u64();
                v[i] = rng.next_u64();
            }
            std::vector<uint64_t> a(n);
            std::vector<uint64_t> b(n);
            sc.xor_words(a.data(), u.data(), v.data(), n);
            simd->xor_words(b.data(), u.data(), v.data(), n);
            CHECK(a == b);
            CHECK(sc.popcount_words(u.data(), n) == simd->popcount_words(u.data(), n));
        }
    }
}

TEST_CASE("backend forcing") {
    CHECK(kernels::force_backend("scalar"));
    CHECK(std::string(kernels::active().name) == "scalar");
    CHECK_FALSE(kernels::force_backend("made-up"));
    CHECK(kernels::force_backend("auto"));
    if (kernels::avx2_table() != nullptr) {
        CHECK(std::string(kernels::active().name) == "avx2");
    }
}

TEST_CASE("BitVec xor/popcount/hamming") {
    Rng rng(15);
    BitVec a(300);
    BitVec b(300);
    for (size_t i = 0; i < 300; ++i) {
        a.set(i, rng.next_bit());
        b.set(i, rng.next_bit());
    }
    const BitVec c = a ^ b;
    uint64_t diff = 0;
    for (size_t i = 0; i < 300; ++i) {
        CHECK(c.get(i) == (a.get(i) != b.get(i)));
        diff += a.get(i) != b.get(i) ? 1 : 0;
    }
    CHECK(c.popcount() == diff);
    CHECK(a.hamming_distance(b) == diff);
    CHECK(a.slice(10, 20).size() == 20);
    CHECK(a.slice(10, 20).get(0) == a.get(10));
    CHECK_THROWS(a ^ BitVec(299));
}
