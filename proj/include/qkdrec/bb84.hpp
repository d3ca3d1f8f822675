#pragma once

#include <cstdint>
#include <vector>

#include "qkdrec/bits.hpp"
#include "qkdrec/channels.hpp"

namespace qkdrec {

// Alice/Bob bit strings aligned after basis sifting. The ground-truth error
// pattern is kept for scoring only; the protocol never sees it.
struct SiftedKeyPair {
    BitVec alice_bits;
    BitVec bob_bits;
    BitVec ground_truth_error;  // alice_bits ^ bob_bits
    std::vector<uint64_t> kept_indices;

    size_t size() const { return alice_bits.size(); }
};

struct EstimationResult {
    size_t disclosed_count = 0;
    double qber_estimate = 0.0;
    SiftedKeyPair remaining_pair;
};

// BB84 steps (i)-(ii): Alice prepares uniform bits in uniform bases, frames
// traverse the channel stack, Bob measures in uniform bases. Positions where
// Bob's basis matches Alice's survive sifting (expected fraction 1/2).
// A mismatched-basis measurement yields an unbiased random bit.
SiftedKeyPair run_exchange(size_t n_qubits, const ChannelStack &stack, Rng &rng);

// Disclose a uniform random subset (fraction of the sifted length, at least
// one bit), estimate QBER on it, and return the pair with those positions
// removed. Throws if the disclosed sample would be empty or cover everything.
EstimationResult estimate_parameters(const SiftedKeyPair &pair, double disclose_fraction,
                                     Rng &rng);

}  // namespace qkdrec
