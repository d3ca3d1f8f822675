#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracle_helpers.hpp"
#include "qkdrec/ldpc.hpp"
#include "qkdrec/rng.hpp"

using namespace qkdrec;

namespace {

void check_regular(const ParityCheckMatrix &H, size_t dv, size_t dc) {
    std::vector<size_t> col(H.n, 0);
    for (const auto &row : H.rows) {
        CHECK(row.size() == dc);
        for (size_t i = 1; i < row.size(); ++i) {
            CHECK(row[i - 1] < row[i]);  // sorted, no parallel edges
        }
        for (uint32_t v : row) {
            ++col[v];
        }
    }
    for (size_t v = 0; v < H.n; ++v) {
        CHECK(col[v] == dv);
    }
}

BitVec random_bits(Rng &rng, size_t n) {
    BitVec v(n);
    for (size_t i = 0; i < n; ++i) {
        v.set(i, rng.next_bit());
    }
    return v;
}

BitVec random_error(Rng &rng, size_t n, double q) {
    BitVec v(n);
    for (size_t i = 0; i < n; ++i) {
        v.set(i, rng.next_double() < q);
    }
    return v;
}

}  // namespace

TEST_CASE("build_regular toy dimensions") {
    Rng rng(31);
    const auto H = build_regular(12, 2, 4, 4, rng);
    CHECK(H.n == 12);
    CHECK(H.m == 6);
    check_regular(H, 2, 4);
    CHECK(H.four_cycles == count_four_cycles(H));
}

TEST_CASE("build_regular ldpc1 shape and girth") {
    Rng rng(32);
    const auto H = build_regular(3600, 6, 12, 6, rng);
    CHECK(H.m == 1800);
    CHECK(H.design_rate() == doctest::Approx(0.5));
    check_regular(H, 6, 12);
    CHECK(H.four_cycles == 0);  // the swap passes clear all 4-cycles here
    CHECK(H.edge_count() == 3600 * 6);
}

TEST_CASE("build_regular rejects bad parameters") {
    Rng rng(33);
    CHECK_THROWS_AS(build_regular(10, 3, 4, 4, rng), std::invalid_argument);  // 30 % 4 != 0
    CHECK_THROWS_AS(build_regular(0, 3, 6, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(build_regular(4, 2, 8, 4, rng), std::invalid_argument);  // dc > n
}

TEST_CASE("syndrome linearity and unit vectors") {
    Rng rng(34);
    const auto H = build_regular(60, 3, 6, 6, rng);
    CHECK(syndrome(H, BitVec(60)).popcount() == 0);
    for (int t = 0; t < 50; ++t) {
        const BitVec x = random_bits(rng, 60);
        const BitVec y = random_bits(rng, 60);
        CHECK(syndrome(H, x ^ y) == (syndrome(H, x) ^ syndrome(H, y)));
    }
    for (size_t j = 0; j < H.n; ++j) {
        BitVec e(H.n);
        e.set(j, true);
        const BitVec col = syndrome(H, e);
        for (size_t c = 0; c < H.m; ++c) {
            const bool in_row =
                std::find(H.rows[c].begin(), H.rows[c].end(), j) != H.rows[c].end();
            CHECK(col.get(c) == in_row);
        }
    }
    CHECK_THROWS(syndrome(H, BitVec(59)));
}

TEST_CASE("gf2 rank of small matrices") {
    ParityCheckMatrix H;
    H.n = 4;
    H.m = 3;
    H.rows = {{0, 1}, {1, 2}, {0, 2}};  // third row = sum of the first two
    CHECK(gf2_rank(H) == 2);
    H.rows = {{0, 1}, {1, 2}, {2, 3}};
    CHECK(gf2_rank(H) == 3);
}

TEST_CASE("alist round trip") {
    Rng rng(35);
    const auto H = build_regular(48, 3, 6, 6, rng);
    std::stringstream ss;
    write_alist(H, ss);
    const auto G = read_alist(ss);
    CHECK(G.n == H.n);
    CHECK(G.m == H.m);
    CHECK(G.rows == H.rows);
    CHECK(G.dv == 3);
    CHECK(G.dc == 6);
    CHECK(G.four_cycles == H.four_cycles);
}

TEST_CASE("alist rejects malformed input") {
    std::stringstream ss("3 2 1 1\n1 1 1\n1 2\n1\n2\n9\n");
    CHECK_THROWS(read_alist(ss));
}

TEST_CASE("bp decode: zero syndrome converges to zero in one iteration") {
    Rng rng(36);
    const auto H = build_regular(120, 3, 6, 6, rng);
    const auto [est, trace] = bp_syndrome_decode(H, BitVec(H.m), 0.05, 50);
    CHECK(est.popcount() == 0);
    CHECK(trace.converged);
    CHECK(trace.iterations_used == 1);
    CHECK(trace.residual_unsatisfied_checks == 0);
}

TEST_CASE("bp decode input validation") {
    Rng rng(37);
    const auto H = build_regular(24, 2, 4, 6, rng);
    CHECK_THROWS(bp_syndrome_decode(H, BitVec(H.m + 1), 0.05, 50));
    CHECK_THROWS(bp_syndrome_decode(H, BitVec(H.m), 0.0, 50));
    CHECK_THROWS(bp_syndrome_decode(H, BitVec(H.m), 0.5, 50));
    CHECK_THROWS(bp_syndrome_decode(H, BitVec(H.m), 0.05, 0));
}

TEST_CASE("bp hard decisions match brute-force ML on the toy code") {
    Rng rng(38);
    const auto H = build_regular(12, 2, 4, 6, rng);
    REQUIRE(H.four_cycles == 0);

    SUBCASE("all weight-1 errors decode exactly") {
        for (size_t j = 0; j < H.n; ++j) {
            BitVec e(H.n);
            e.set(j, true);
            const BitVec z = syndrome(H, e);
            const auto ml = oracles::ml_syndrome_error(H, z);
            REQUIRE(ml.has_value());
            CHECK(*ml == e);
            const auto [est, trace] = bp_syndrome_decode(H, z, 0.05, 50);
            CHECK(trace.converged);
            CHECK(est == e);
        }
    }
    SUBCASE("random syndromes: agree whenever ML is unique") {
        size_t compared = 0;
        for (int t = 0; t < 40; ++t) {
            const BitVec e = random_error(rng, H.n, 0.15);
            const BitVec z = syndrome(H, e);
            const auto ml = oracles::ml_syndrome_error(H, z);
            if (!ml.has_value()) {
                continue;
            }
            const auto [est, trace] = bp_syndrome_decode(H, z, 0.1, 80);
            if (trace.converged) {
                CHECK(est == *ml);
                ++compared;
            }
        }
        CHECK(compared > 10);
    }
}

TEST_CASE("bp marginals equal exact marginals on a cycle-free graph") {
    // Chain of three checks; the Tanner graph is a tree, so sum-product is
    // exact once messages settle.
    ParityCheckMatrix H;
    H.n = 7;
    H.m = 3;
    H.rows = {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}};

    Rng rng(39);
    for (int t = 0; t < 20; ++t) {
        const double q = 0.05 + 0.3 * rng.next_double();
        const BitVec e = random_error(rng, H.n, q);
        const BitVec z = syndrome(H, e);
        const auto exact = oracles::exact_syndrome_marginals(H, z, q);

        BpDecoder dec(H);
        BpOptions opts;
        opts.max_iter = 30;
        opts.early_stop = false;  // run to the fixed point regardless of syndrome
        dec.decode(z, q, opts);
        const auto &llrs = dec.posterior_llrs();
        for (size_t i = 0; i < H.n; ++i) {
            const double p1 = 1.0 / (1.0 + std::exp(llrs[i]));
            CHECK(std::abs(p1 - exact[i]) < 1e-9);
        }
    }
}

TEST_CASE("converged decodes satisfy their syndrome") {
    Rng rng(40);
    const auto H = build_regular(1200, 6, 12, 6, rng);
    BpDecoder dec(H);
    size_t converged = 0;
    for (int t = 0; t < 20; ++t) {
        const BitVec e = random_error(rng, H.n, 0.04);
        const BitVec z = syndrome(H, e);
        BpOptions opts;
        const auto [est, trace] = dec.decode(z, 0.04, opts);
        if (trace.converged) {
            CHECK(syndrome(H, est) == z);
            CHECK(trace.residual_unsatisfied_checks == 0);
            ++converged;
        }
    }
    CHECK(converged >= 18);  // comfortably below threshold
}

TEST_CASE("ldpc1 residual bit-error rate below 1e-3 at prior 0.04") {
    Rng rng(41);
    const auto H = build_regular(3600, 6, 12, 6, rng);
    BpDecoder dec(H);
    uint64_t wrong = 0;
    uint64_t total = 0;
    const size_t trials = 300;
    for (size_t t = 0; t < trials; ++t) {
        const BitVec e = random_error(rng, H.n, 0.04);
        const auto [est, trace] = dec.decode(syndrome(H, e), 0.04, BpOptions{});
        wrong += est.hamming_distance(e);
        total += H.n;
    }
    CHECK(static_cast<double>(wrong) / static_cast<double>(total) < 1e-3);
}

TEST_CASE("bp success rate is non-increasing in the flip prior") {
    Rng rng(42);
    const auto H = build_regular(1200, 6, 12, 6, rng);
    BpDecoder dec(H);
    auto success_rate = [&](double q) {
        size_t ok = 0;
        const int trials = 40;
        for (int t = 0; t < trials; ++t) {
            const BitVec e = random_error(rng, H.n, q);
            const auto [est, trace] = dec.decode(syndrome(H, e), q, BpOptions{});
            ok += (trace.converged && est == e) ? 1 : 0;
        }
        return static_cast<double>(ok) / trials;
    };
    const double s1 = success_rate(0.02);
    const double s2 = success_rate(0.05);
    const double s3 = success_rate(0.09);
    const double slack = 0.1;  // statistical monotonicity
    CHECK(s1 >= s2 - slack);
    CHECK(s2 >= s3 - slack);
    CHECK(s1 > 0.9);
    CHECK(s3 < 0.5);
}
