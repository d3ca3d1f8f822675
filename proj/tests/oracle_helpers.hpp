#pragma once

// Brute-force oracles shared by the decoder test suites. All of them
// enumerate exhaustively and stay independent of the implementation paths
// they check.

#include <cmath>
#include <optional>
#include <vector>

#include "qkdrec/bits.hpp"
#include "qkdrec/ldpc.hpp"
#include "qkdrec/turbo.hpp"

namespace qkdrec::oracles {

inline BitVec bits_from_index(uint64_t idx, size_t n) {
    BitVec v(n);
    for (size_t i = 0; i < n; ++i) {
        v.set(i, (idx >> i) & 1);
    }
    return v;
}

// Most likely error pattern with the given syndrome under an iid flip prior
// q < 1/2 (equivalently the minimum-weight coset member). nullopt when the
// minimizer is not unique.
inline std::optional<BitVec> ml_syndrome_error(const ParityCheckMatrix &H, const BitVec &z) {
    std::optional<BitVec> best;
    size_t best_weight = H.n + 1;
    bool unique = false;
    for (uint64_t idx = 0; idx < (uint64_t{1} << H.n); ++idx) {
        const BitVec e = bits_from_index(idx, H.n);
        if (syndrome(H, e) != z) {
            continue;
        }
        const auto w = static_cast<size_t>(e.popcount());
        if (w < best_weight) {
            best_weight = w;
            best = e;
            unique = true;
        } else if (w == best_weight) {
            unique = false;
        }
    }
    if (!best || !unique) {
        return std::nullopt;
    }
    return best;
}

// Exact per-bit posterior flip probabilities given the syndrome, under an
// iid flip prior.
inline std::vector<double> exact_syndrome_marginals(const ParityCheckMatrix &H, const BitVec &z,
                                                    double q) {
    std::vector<double> p1(H.n, 0.0);
    double total = 0.0;
    for (uint64_t idx = 0; idx < (uint64_t{1} << H.n); ++idx) {
        const BitVec e = bits_from_index(idx, H.n);
        if (syndrome(H, e) != z) {
            continue;
        }
        const auto w = static_cast<double>(e.popcount());
        const double weight =
            std::pow(q, w) * std::pow(1.0 - q, static_cast<double>(H.n) - w);
        total += weight;
        for (size_t i = 0; i < H.n; ++i) {
            if (e.get(i)) {
                p1[i] += weight;
            }
        }
    }
    for (auto &v : p1) {
        v /= total;
    }
    return p1;
}

// Minimum-weight member of the serial turbo coset with syndrome z, by
// enumerating all 2^K info words. nullopt when not unique.
inline std::optional<BitVec> ml_turbo_coset(const SerialTurboSpec &spec, const BitVec &z) {
    std::optional<BitVec> best;
    size_t best_weight = spec.codeword_len() + 1;
    bool unique = false;
    for (uint64_t idx = 0; idx < (uint64_t{1} << spec.block_len); ++idx) {
        const BitVec e = serial_coset_embed(spec, bits_from_index(idx, spec.block_len), z);
        const auto w = static_cast<size_t>(e.popcount());
        if (w < best_weight) {
            best_weight = w;
            best = e;
            unique = true;
        } else if (w == best_weight) {
            unique = false;
        }
    }
    if (!best || !unique) {
        return std::nullopt;
    }
    return best;
}

}  // namespace qkdrec::oracles
