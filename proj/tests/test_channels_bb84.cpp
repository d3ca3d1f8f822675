#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkdrec/bb84.hpp"
#include "qkdrec/channels.hpp"
#include "qkdrec/metrics.hpp"

using namespace qkdrec;

TEST_CASE("depolarizing channel with p=0 never touches the frame") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        PauliFrame f{random_basis(rng), static_cast<uint8_t>(rng.next_bit()), Pauli::I};
        const PauliFrame g = apply_depolarizing(f, DepolarizingParams{0.0}, rng);
        CHECK(g.error == Pauli::I);
        CHECK(g.prep_basis == f.prep_basis);
        CHECK(g.prep_bit == f.prep_bit);
    }
}

TEST_CASE("depolarizing channel at p=1 spreads X, Y, Z at 1/3 each") {
    Rng rng(2);
    const size_t draws = 100000;
    size_t counts[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < draws; ++i) {
        PauliFrame f;
        f = apply_depolarizing(f, DepolarizingParams{1.0}, rng);
        ++counts[static_cast<size_t>(f.error)];
    }
    CHECK(counts[0] == 0);  // error != I with probability 1
    for (int e = 1; e < 4; ++e) {
        CHECK(std::abs(static_cast<double>(counts[e]) / draws - 1.0 / 3.0) < 0.01);
    }
}

TEST_CASE("depolarizing marginal distribution passes chi-square at 1%") {
    // 3 degrees of freedom; critical value at the 1% level.
    const double kChi2Crit = 11.3449;
    for (double p : {0.09, 0.3, 0.7}) {
        Rng rng(3);
        const size_t draws = 100000;
        size_t counts[4] = {0, 0, 0, 0};
        for (size_t i = 0; i < draws; ++i) {
            PauliFrame f;
            f = apply_depolarizing(f, DepolarizingParams{p}, rng);
            ++counts[static_cast<size_t>(f.error)];
        }
        const double expect[4] = {draws * (1.0 - p), draws * p / 3, draws * p / 3, draws * p / 3};
        double chi2 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double d = static_cast<double>(counts[i]) - expect[i];
            chi2 += d * d / expect[i];
        }
        CHECK(chi2 < kChi2Crit);
    }
}

TEST_CASE("matched-basis flip rate is 2p/3") {
    Rng rng(4);
    const double p = 0.09;
    const size_t draws = 100000;
    size_t flips = 0;
    for (size_t i = 0; i < draws; ++i) {
        PauliFrame f{Basis::Rectilinear, 0, Pauli::I};
        f = apply_depolarizing(f, DepolarizingParams{p}, rng);
        flips += measurement_flip(f.error, Basis::Rectilinear) ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(flips) / draws - 2.0 * p / 3.0) < 0.005);
}

TEST_CASE("intercept-resend with s=0 is the identity") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        PauliFrame f{random_basis(rng), static_cast<uint8_t>(rng.next_bit()), Pauli::X};
        const PauliFrame g = apply_intercept_resend(f, InterceptResendParams{0.0}, rng);
        CHECK(g.prep_basis == f.prep_basis);
        CHECK(g.prep_bit == f.prep_bit);
        CHECK(g.error == f.error);
    }
}

TEST_CASE("full intercept-resend induces sifted QBER s/4") {
    SUBCASE("s = 1") {
        Rng rng(6);
        const auto pair = run_exchange(220000, ChannelStack::standard(0.0, 1.0), rng);
        REQUIRE(pair.size() >= 100000);
        CHECK(std::abs(qber(pair.alice_bits, pair.bob_bits) - 0.25) < 0.01);
    }
    SUBCASE("s = 0.5") {
        Rng rng(7);
        const auto pair = run_exchange(220000, ChannelStack::standard(0.0, 0.5), rng);
        REQUIRE(pair.size() >= 100000);
        CHECK(std::abs(qber(pair.alice_bits, pair.bob_bits) - 0.125) < 0.01);
    }
}

TEST_CASE("analytic sifted QBER closed form") {
    for (double s : {0.0, 0.2, 0.7, 1.0}) {
        CHECK(analytic_sifted_qber(0.0, s) == doctest::Approx(s / 4.0).epsilon(1e-15));
    }
    for (double p : {0.0, 0.03, 0.3}) {
        CHECK(analytic_sifted_qber(p, 0.0) == doctest::Approx(2.0 * p / 3.0).epsilon(1e-15));
    }
    CHECK(analytic_sifted_qber(0.03, 0.2) == doctest::Approx(0.068).epsilon(1e-12));
    CHECK_THROWS(analytic_sifted_qber(-0.1, 0.0));
    CHECK_THROWS(analytic_sifted_qber(0.0, 1.5));
}

TEST_CASE("analytic sifted QBER agrees with the Monte Carlo oracle") {
    // The formula a + b - 2ab is only trusted because this oracle backs it:
    // >= 1e6 sifted bits at an interacting (p, s) point.
    Rng rng(8);
    const double p = 0.03;
    const double s = 0.2;
    size_t mism = 0;
    size_t total = 0;
    while (total < 1000000) {
        const auto pair = run_exchange(500000, ChannelStack::standard(p, s), rng);
        mism += pair.ground_truth_error.popcount();
        total += pair.size();
    }
    const double mc = static_cast<double>(mism) / static_cast<double>(total);
    const double sigma = std::sqrt(0.068 * (1 - 0.068) / static_cast<double>(total));
    CHECK(std::abs(mc - analytic_sifted_qber(p, s)) < 5 * sigma + 1e-6);
}

TEST_CASE("QBER is monotone in p and s on a sweep grid") {
    auto mean_qber = [](double p, double s, uint64_t seed) {
        Rng rng(seed);
        const auto pair = run_exchange(120000, ChannelStack::standard(p, s), rng);
        return qber(pair.alice_bits, pair.bob_bits);
    };
    const double slack = 0.004;  // overlapping confidence intervals allowed
    double prev = -1.0;
    for (double p : {0.0, 0.05, 0.1, 0.2}) {
        const double q = mean_qber(p, 0.1, 9);
        CHECK(q >= prev - slack);
        prev = q;
    }
    prev = -1.0;
    for (double s : {0.0, 0.25, 0.5, 1.0}) {
        const double q = mean_qber(0.02, s, 10);
        CHECK(q >= prev - slack);
        prev = q;
    }
}

TEST_CASE("channel stack determinism: same seed, same stream") {
    for (int rep = 0; rep < 2; ++rep) {
        Rng a(11);
        Rng b(11);
        const auto pa = run_exchange(5000, ChannelStack::standard(0.1, 0.3), a);
        const auto pb = run_exchange(5000, ChannelStack::standard(0.1, 0.3), b);
        CHECK(pa.alice_bits == pb.alice_bits);
        CHECK(pa.bob_bits == pb.bob_bits);
        CHECK(pa.kept_indices == pb.kept_indices);
    }
}

TEST_CASE("stack order is explicit: intercept-resend before depolarizing") {
    const auto stack = ChannelStack::standard(0.1, 0.2);
    REQUIRE(stack.stages.size() == 2);
    CHECK(std::holds_alternative<InterceptResendParams>(stack.stages[0]));
    CHECK(std::holds_alternative<DepolarizingParams>(stack.stages[1]));
}

TEST_CASE("run_exchange on the identity stack") {
    Rng rng(12);
    const auto pair = run_exchange(100000, ChannelStack{}, rng);
    CHECK(pair.alice_bits == pair.bob_bits);
    CHECK(pair.ground_truth_error.popcount() == 0);
    const double kept = static_cast<double>(pair.size()) / 100000.0;
    CHECK(std::abs(kept - 0.5) < 0.01);
    // ground truth stays consistent through the pipeline
    CHECK(pair.ground_truth_error == (pair.alice_bits ^ pair.bob_bits));
    CHECK(pair.kept_indices.size() == pair.size());
}

TEST_CASE("run_exchange rejects n_qubits = 0") {
    Rng rng(13);
    CHECK_THROWS_AS(run_exchange(0, ChannelStack{}, rng), std::invalid_argument);
}

TEST_CASE("ground-truth invariant under a noisy stack") {
    Rng rng(14);
    const auto pair = run_exchange(50000, ChannelStack::standard(0.05, 0.3), rng);
    CHECK(pair.ground_truth_error == (pair.alice_bits ^ pair.bob_bits));
}

TEST_CASE("estimate_parameters") {
    SUBCASE("error-free pair estimates zero") {
        Rng rng(15);
        const auto pair = run_exchange(20000, ChannelStack{}, rng);
        const auto est = estimate_parameters(pair, 0.3, rng);
        CHECK(est.qber_estimate == 0.0);
        CHECK(est.remaining_pair.size() == pair.size() - est.disclosed_count);
    }
    SUBCASE("planted 10% mismatches, half disclosed") {
        SiftedKeyPair pair;
        const size_t n = 10000;
        pair.alice_bits = BitVec(n);
        pair.bob_bits = BitVec(n);
        for (size_t i = 0; i < n; ++i) {
            pair.bob_bits.set(i, i % 10 == 0);  // exactly 10% mismatches
            pair.kept_indices.push_back(i);
        }
        pair.ground_truth_error = pair.alice_bits ^ pair.bob_bits;
        Rng rng(16);
        const auto est = estimate_parameters(pair, 0.5, rng);
        CHECK(est.disclosed_count == 5000);
        CHECK(std::abs(est.qber_estimate - 0.10) < 0.015);
        CHECK(est.remaining_pair.size() == 5000);
        CHECK(est.remaining_pair.ground_truth_error ==
              (est.remaining_pair.alice_bits ^ est.remaining_pair.bob_bits));
    }
    SUBCASE("degenerate fractions are rejected") {
        Rng rng(17);
        const auto pair = run_exchange(1000, ChannelStack{}, rng);
        CHECK_THROWS_AS(estimate_parameters(pair, 0.0, rng), std::invalid_argument);
        CHECK_THROWS_AS(estimate_parameters(pair, 1.0, rng), std::invalid_argument);
    }
}
