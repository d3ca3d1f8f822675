#include "qkdrec/reconciler.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

#include "qkdrec/metrics.hpp"

namespace qkdrec {

const char *to_string(RateVerdict v) {
    switch (v) {
        case RateVerdict::Feasible:
            return "feasible";
        case RateVerdict::Marginal:
            return "marginal";
        case RateVerdict::Infeasible:
            return "infeasible";
    }
    return "?";
}

RateAdvisory rate_check(const Codec &codec, double prior_flip) {
    RateAdvisory adv;
    adv.leak_rate =
        static_cast<double>(codec.syndrome_len()) / static_cast<double>(codec.block_len());
    adv.entropy = binary_entropy(prior_flip);
    if (adv.entropy <= 0.0) {
        adv.ratio = std::numeric_limits<double>::infinity();
        adv.verdict = RateVerdict::Feasible;
        return adv;
    }
    adv.ratio = adv.leak_rate / adv.entropy;
    if (adv.ratio >= 1.05) {
        adv.verdict = RateVerdict::Feasible;
    } else if (adv.ratio >= 0.95) {
        adv.verdict = RateVerdict::Marginal;
    } else {
        adv.verdict = RateVerdict::Infeasible;
    }
    return adv;
}

ReconciliationReport reconcile(const SiftedKeyPair &pair, const Codec &codec, double prior_flip,
                               const ReconcileOptions &opts) {
    const size_t bl = codec.block_len();
    if (pair.size() < bl) {
        throw std::invalid_argument("reconcile: sifted pair shorter than one code block");
    }
    if (!(prior_flip > 0.0 && prior_flip < 0.5)) {
        throw std::invalid_argument("reconcile: prior_flip must be in (0, 0.5)");
    }
    const size_t iterations = opts.iterations > 0 ? opts.iterations : codec.default_iterations();
    const size_t blocks = pair.size() / bl;

    ReconciliationReport rep;
    rep.blocks = blocks;
    rep.framed_bits = blocks * bl;
    rep.remainder_bits = pair.size() - rep.framed_bits;
    rep.leakage_bits = static_cast<uint64_t>(blocks) * codec.syndrome_len();
    rep.claimed_success = true;
    rep.success = true;

    std::vector<uint64_t> iter_mismatch;
    uint64_t before_mismatch = 0;
    uint64_t after_mismatch = 0;

    const auto t0 = std::chrono::steady_clock::now();
    for (size_t b = 0; b < blocks; ++b) {
        const BitVec alice = pair.alice_bits.slice(b * bl, bl);
        const BitVec bob = pair.bob_bits.slice(b * bl, bl);
        const BitVec &publisher = opts.reverse ? bob : alice;
        const BitVec &corrector = opts.reverse ? alice : bob;

        const BitVec zeta = codec.compute_syndrome(publisher) ^ codec.compute_syndrome(corrector);
        auto out = codec.decode(zeta, prior_flip, iterations, opts.record_iteration_trace);
        const BitVec corrected = corrector ^ out.estimate;

        before_mismatch += alice.hamming_distance(bob);
        after_mismatch += corrected.hamming_distance(publisher);
        rep.claimed_success = rep.claimed_success && out.claimed_success;
        rep.success = rep.success && corrected == publisher;
        rep.block_iterations.push_back(out.iterations_used);
        rep.corrected_key.append(corrected);

        if (opts.record_iteration_trace) {
            if (iter_mismatch.size() < out.per_iteration_estimates.size()) {
                iter_mismatch.resize(out.per_iteration_estimates.size(), 0);
            }
            for (size_t it = 0; it < out.per_iteration_estimates.size(); ++it) {
                const BitVec c_it = corrector ^ out.per_iteration_estimates[it];
                iter_mismatch[it] += c_it.hamming_distance(publisher);
            }
        }
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // The tail shorter than one block passes through uncorrected.
    if (rep.remainder_bits > 0) {
        const BitVec &tail_src = opts.reverse ? pair.alice_bits : pair.bob_bits;
        rep.corrected_key.append(tail_src.slice(rep.framed_bits, rep.remainder_bits));
    }

    rep.qber_before =
        static_cast<double>(before_mismatch) / static_cast<double>(rep.framed_bits);
    rep.qber_after = static_cast<double>(after_mismatch) / static_cast<double>(rep.framed_bits);
    for (uint64_t mm : iter_mismatch) {
        rep.per_iteration_qber.push_back(static_cast<double>(mm) /
                                         static_cast<double>(rep.framed_bits));
    }
    return rep;
}

}  // namespace qkdrec
