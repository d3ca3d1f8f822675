#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkdrec/metrics.hpp"
#include "qkdrec/rng.hpp"

#if QKDREC_HAVE_MPFR
#include <mpfr.h>
#endif

using namespace qkdrec;

TEST_CASE("qber basics") {
    CHECK(qber(BitVec::from_string("10110"), BitVec::from_string("10110")) == 0.0);
    CHECK(qber(BitVec::from_string("1010"), BitVec::from_string("0101")) == 1.0);
    CHECK(qber(BitVec::from_string("10000000"), BitVec::from_string("00000000")) == 0.125);
    CHECK_THROWS(qber(BitVec(5), BitVec(6)));
    CHECK_THROWS(qber(BitVec(0), BitVec(0)));
}

TEST_CASE("qber symmetry and triangle bound on random strings") {
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        BitVec a(256);
        BitVec b(256);
        BitVec c(256);
        for (size_t i = 0; i < 256; ++i) {
            a.set(i, rng.next_bit());
            b.set(i, rng.next_bit());
            c.set(i, rng.next_bit());
        }
        CHECK(qber(a, b) == qber(b, a));
        CHECK(qber(a, a) == 0.0);
        CHECK(qber(a, c) <= qber(a, b) + qber(b, c) + 1e-15);
    }
}

TEST_CASE("secret info bound boundary and frozen values") {
    CHECK(secret_info_bound(0.0) == 1.0);
    CHECK(secret_info_bound(1.0) == 1.0);
    CHECK(secret_info_bound(0.5) == 0.0);
    // Frozen from an independent arbitrary-precision evaluation (50 digits).
    CHECK(std::abs(secret_info_bound(0.11) - 0.50008404183547200436) < 1e-12);
    CHECK_THROWS(secret_info_bound(-0.01));
    CHECK_THROWS(secret_info_bound(1.01));
}

TEST_CASE("secret info bound symmetry, minimum at 1/2") {
    for (int i = 0; i <= 1000; ++i) {
        const double d = static_cast<double>(i) / 1000.0;
        CHECK(std::abs(secret_info_bound(d) - secret_info_bound(1.0 - d)) < 1e-12);
        CHECK(secret_info_bound(d) >= -1e-15);
        CHECK(secret_info_bound(d) <= 1.0);
    }
    CHECK(secret_info_bound(0.5) <= secret_info_bound(0.499));
    CHECK(secret_info_bound(0.5) <= secret_info_bound(0.501));
}

#if QKDREC_HAVE_MPFR
TEST_CASE("secret info bound matches a 200-bit MPFR evaluation to 1e-12") {
    mpfr_t d, omd, t1, t2, acc;
    mpfr_inits2(200, d, omd, t1, t2, acc, static_cast<mpfr_ptr>(nullptr));
    for (int i = 0; i <= 1000; ++i) {
        const double delta = static_cast<double>(i) / 1000.0;
        mpfr_set_d(d, delta, MPFR_RNDN);
        mpfr_ui_sub(omd, 1, d, MPFR_RNDN);
        mpfr_set_ui(acc, 1, MPFR_RNDN);
        if (delta > 0.0) {
            mpfr_log2(t1, d, MPFR_RNDN);
            mpfr_mul(t1, t1, d, MPFR_RNDN);
            mpfr_add(acc, acc, t1, MPFR_RNDN);
        }
        if (delta < 1.0) {
            mpfr_log2(t2, omd, MPFR_RNDN);
            mpfr_mul(t2, t2, omd, MPFR_RNDN);
            mpfr_add(acc, acc, t2, MPFR_RNDN);
        }
        const double ref = mpfr_get_d(acc, MPFR_RNDN);
        CHECK(std::abs(secret_info_bound(delta) - ref) < 1e-12);
    }
    mpfr_clears(d, omd, t1, t2, acc, static_cast<mpfr_ptr>(nullptr));
}
#endif

TEST_CASE("efficiency") {
    // leakage = n * h2(q) exactly -> 1.0
    const double q = 0.07;
    const double h = binary_entropy(q);
    CHECK(efficiency(static_cast<uint64_t>(h * 1e6), 1000000, q) ==
          doctest::Approx(1.0).epsilon(1e-5));
    // Turbo1 leakage rate 8/9 at q = 0.11 (frozen independent evaluation)
    CHECK(efficiency(8000, 9000, 0.11) == doctest::Approx(1.778076643427).epsilon(1e-9));
    CHECK_THROWS(efficiency(10, 100, 0.0));
    CHECK_THROWS(efficiency(10, 100, 0.5));
    CHECK_THROWS(efficiency(10, 0, 0.1));
}

TEST_CASE("fit_slope recovers exact affine data") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{3.0, 5.0, 7.0, 9.0};
    const auto [b, se] = fit_slope(x, y);
    CHECK(b == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(se == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS(fit_slope({1.0, 2.0}, {1.0, 2.0}));
}

TEST_CASE("complexity_probe on synthetic timings") {
    // Linear synthetic cost: the fitted exponent is 1 by construction.
    auto linear = [](size_t n) { return 1e-9 * static_cast<double>(n); };
    const auto fit = complexity_probe(linear, {1000, 10000, 100000}, 3);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.points.size() == 3);

    auto quadratic = [](size_t n) { return 1e-12 * static_cast<double>(n) * static_cast<double>(n); };
    CHECK(complexity_probe(quadratic, {1000, 10000, 100000}, 1).exponent ==
          doctest::Approx(2.0).epsilon(1e-9));

    CHECK_THROWS(complexity_probe(linear, {1000}, 3));             // too few sizes
    CHECK_THROWS(complexity_probe(linear, {1000, 2000, 4000}, 3));  // < 2 decades
    CHECK_THROWS(complexity_probe(linear, {1000, 10000, 100000}, 0));
}
