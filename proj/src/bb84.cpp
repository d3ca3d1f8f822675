#include "qkdrec/bb84.hpp"

#include <algorithm>
#include <stdexcept>

namespace qkdrec {

SiftedKeyPair run_exchange(size_t n_qubits, const ChannelStack &stack, Rng &rng) {
    if (n_qubits == 0) {
        throw std::invalid_argument("run_exchange: n_qubits must be >= 1");
    }
    SiftedKeyPair pair;
    pair.kept_indices.reserve(n_qubits / 2 + 64);
    for (size_t i = 0; i < n_qubits; ++i) {
        const Basis alice_basis = random_basis(rng);
        const auto alice_bit = static_cast<uint8_t>(rng.next_bit());
        PauliFrame frame{alice_basis, alice_bit, Pauli::I};
        frame = apply_stack(frame, stack, rng);

        const Basis bob_basis = random_basis(rng);
        uint8_t bob_bit;
        if (bob_basis == frame.prep_basis) {
            bob_bit =
                frame.prep_bit ^ static_cast<uint8_t>(measurement_flip(frame.error, bob_basis));
        } else {
            bob_bit = static_cast<uint8_t>(rng.next_bit());
        }

        // Sifting compares Bob's basis against Alice's announced one; after an
        // intercept the frame's basis may be Eve's, which stays private.
        if (bob_basis == alice_basis) {
            pair.alice_bits.push_back(alice_bit != 0);
            pair.bob_bits.push_back(bob_bit != 0);
            pair.ground_truth_error.push_back(alice_bit != bob_bit);
            pair.kept_indices.push_back(i);
        }
    }
    return pair;
}

EstimationResult estimate_parameters(const SiftedKeyPair &pair, double disclose_fraction,
                                     Rng &rng) {
    if (!(disclose_fraction > 0.0 && disclose_fraction < 1.0)) {
        throw std::invalid_argument("estimate_parameters: disclose_fraction must be in (0, 1)");
    }
    const size_t n = pair.size();
    const auto disclosed = static_cast<size_t>(static_cast<double>(n) * disclose_fraction);
    if (disclosed == 0) {
        throw std::invalid_argument("estimate_parameters: disclosed sample would be empty");
    }

    // Partial Fisher-Yates: the first `disclosed` entries form a uniform subset.
    std::vector<uint64_t> order(n);
    for (size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    for (size_t i = 0; i < disclosed; ++i) {
        const size_t j = i + static_cast<size_t>(rng.next_below(n - i));
        std::swap(order[i], order[j]);
    }
    std::vector<bool> is_disclosed(n, false);
    size_t mismatches = 0;
    for (size_t i = 0; i < disclosed; ++i) {
        const auto pos = static_cast<size_t>(order[i]);
        is_disclosed[pos] = true;
        if (pair.alice_bits.get(pos) != pair.bob_bits.get(pos)) {
            ++mismatches;
        }
    }

    EstimationResult res;
    res.disclosed_count = disclosed;
    res.qber_estimate = static_cast<double>(mismatches) / static_cast<double>(disclosed);
    for (size_t i = 0; i < n; ++i) {
        if (is_disclosed[i]) {
            continue;
        }
        res.remaining_pair.alice_bits.push_back(pair.alice_bits.get(i));
        res.remaining_pair.bob_bits.push_back(pair.bob_bits.get(i));
        res.remaining_pair.ground_truth_error.push_back(pair.ground_truth_error.get(i));
        res.remaining_pair.kept_indices.push_back(pair.kept_indices[i]);
    }
    return res;
}

}  // namespace qkdrec
