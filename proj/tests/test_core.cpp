#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "qkdrec/pauli.hpp"
#include "qkdrec/rng.hpp"

using namespace qkdrec;

namespace {
constexpr std::array<Pauli, 4> kAll = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
constexpr std::array<Basis, 2> kBases = {Basis::Rectilinear, Basis::Diagonal};
}  // namespace

TEST_CASE("pauli composition table") {
    CHECK(compose(Pauli::I, Pauli::X) == Pauli::X);
    CHECK(compose(Pauli::X, Pauli::X) == Pauli::I);
    CHECK(compose(Pauli::X, Pauli::Z) == Pauli::Y);
    CHECK(compose(Pauli::Z, Pauli::X) == Pauli::Y);
    CHECK(compose(Pauli::X, Pauli::Y) == Pauli::Z);
    CHECK(compose(Pauli::Y, Pauli::Z) == Pauli::X);
    for (Pauli a : kAll) {
        CHECK(compose(a, Pauli::I) == a);
        CHECK(compose(Pauli::I, a) == a);
        CHECK(compose(a, a) == Pauli::I);  // self-inverse
        for (Pauli b : kAll) {
            CHECK(compose(a, b) == compose(b, a));  // class-level commutativity
            for (Pauli c : kAll) {
                CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
            }
        }
    }
}

TEST_CASE("measurement flips") {
    CHECK(measurement_flip(Pauli::I, Basis::Rectilinear) == false);
    CHECK(measurement_flip(Pauli::Z, Basis::Rectilinear) == false);
    CHECK(measurement_flip(Pauli::X, Basis::Rectilinear) == true);
    CHECK(measurement_flip(Pauli::Y, Basis::Rectilinear) == true);
    CHECK(measurement_flip(Pauli::X, Basis::Diagonal) == false);
    CHECK(measurement_flip(Pauli::Z, Basis::Diagonal) == true);
    CHECK(measurement_flip(Pauli::Y, Basis::Diagonal) == true);

    // Exactly 2 of the 3 non-identity errors flip in each basis; this is
    // what pins the 2p/3 effective flip rate downstream.
    for (Basis b : kBases) {
        int flips = 0;
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
            flips += measurement_flip(p, b) ? 1 : 0;
        }
        CHECK(flips == 2);
        CHECK_FALSE(measurement_flip(Pauli::I, b));
    }

    // flip(a∘b) = flip(a) XOR flip(b)
    for (Pauli a : kAll) {
        for (Pauli b : kAll) {
            for (Basis beta : kBases) {
                CHECK(measurement_flip(compose(a, b), beta) ==
                      (measurement_flip(a, beta) != measurement_flip(b, beta)));
            }
        }
    }
}

TEST_CASE("pauli frame accumulates errors associatively") {
    PauliFrame f{Basis::Diagonal, 1, Pauli::I};
    CHECK(f.error == Pauli::I);
    f.apply(Pauli::X);
    f.apply(Pauli::Z);
    PauliFrame g{Basis::Diagonal, 1, Pauli::I};
    g.apply(compose(Pauli::X, Pauli::Z));
    CHECK(f.error == g.error);
    CHECK(f.error == Pauli::Y);
}

TEST_CASE("rng determinism and stream splitting") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, "code:x") == derive_seed(1, "code:x"));
    CHECK(derive_seed(1, "code:x") != derive_seed(1, "code:y"));
}

TEST_CASE("rng uniformity basics") {
    Rng rng(7);
    const size_t n = 200000;
    size_t ones = 0;
    for (size_t i = 0; i < n; ++i) {
        ones += rng.next_bit() ? 1 : 0;
    }
    const double frac = static_cast<double>(ones) / static_cast<double>(n);
    CHECK(frac > 0.49);
    CHECK(frac < 0.51);

    size_t hits[5] = {0, 0, 0, 0, 0};
    for (size_t i = 0; i < n; ++i) {
        ++hits[rng.next_below(5)];
    }
    for (size_t h : hits) {
        CHECK(static_cast<double>(h) / static_cast<double>(n) == doctest::Approx(0.2).epsilon(0.05));
    }
}

TEST_CASE("basis draw is unbiased") {
    Rng rng(123);
    size_t diag = 0;
    const size_t n = 100000;
    for (size_t i = 0; i < n; ++i) {
        diag += random_basis(rng) == Basis::Diagonal ? 1 : 0;
    }
    // 5-sigma band around 1/2
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(diag) / static_cast<double>(n) - 0.5) < 5 * sigma);
}
