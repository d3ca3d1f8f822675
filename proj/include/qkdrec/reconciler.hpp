#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qkdrec/bb84.hpp"
#include "qkdrec/bits.hpp"

namespace qkdrec {

// Immutable reconciliation codec description. decode() owns its working
// buffers per call, so one codec instance serves concurrent trials.
class Codec {
   public:
    struct DecodeOut {
        BitVec estimate;
        bool claimed_success = false;  // syndrome of the estimate matches
        size_t iterations_used = 0;
        std::vector<BitVec> per_iteration_estimates;
    };

    virtual ~Codec() = default;
    virtual const std::string &name() const = 0;
    virtual size_t block_len() const = 0;
    virtual size_t syndrome_len() const = 0;
    virtual size_t default_iterations() const = 0;
    virtual double code_rate() const = 0;
    virtual BitVec compute_syndrome(const BitVec &block) const = 0;
    virtual DecodeOut decode(const BitVec &zeta, double prior_flip, size_t iterations,
                             bool record_iterations) const = 0;
};

enum class RateVerdict { Feasible, Marginal, Infeasible };

struct RateAdvisory {
    RateVerdict verdict = RateVerdict::Feasible;
    double leak_rate = 0.0;  // (1 - R) = syndrome bits per key bit
    double entropy = 0.0;    // h2(prior_flip), the Slepian-Wolf floor
    double ratio = 0.0;      // leak_rate / entropy
};

// Compares the code's leakage rate against the Slepian-Wolf bound at the
// given flip prior. Within 5 percent of the bound counts as marginal.
RateAdvisory rate_check(const Codec &codec, double prior_flip);

const char *to_string(RateVerdict v);

struct ReconcileOptions {
    size_t iterations = 0;  // 0 -> codec default
    bool record_iteration_trace = false;
    bool reverse = false;  // syndrome flows Bob -> Alice instead
};

struct ReconciliationReport {
    BitVec corrected_key;  // corrected Bob (forward) or corrected Alice (reverse)
    bool success = false;          // ground-truth equality, simulation-only
    bool claimed_success = false;  // protocol-visible syndrome consistency
    uint64_t leakage_bits = 0;     // blocks * syndrome length
    double qber_before = 0.0;
    double qber_after = 0.0;
    size_t blocks = 0;
    size_t framed_bits = 0;
    size_t remainder_bits = 0;  // tail shorter than one block, passed through
    std::vector<size_t> block_iterations;
    std::vector<double> per_iteration_qber;  // vs ground truth, mean over blocks
    double wall_seconds = 0.0;
};

// Slepian-Wolf reconciliation: the publisher side sends the syndrome of its
// sifted key per block; the other side combines it with the syndrome of its
// own block, decodes the relative error pattern, and corrects. Keys are
// framed into whole blocks; the remainder is reported, never dropped.
ReconciliationReport reconcile(const SiftedKeyPair &pair, const Codec &codec, double prior_flip,
                               const ReconcileOptions &opts = {});

}  // namespace qkdrec
