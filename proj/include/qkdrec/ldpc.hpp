#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qkdrec/bits.hpp"
#include "qkdrec/rng.hpp"

namespace qkdrec {

// Binary parity-check matrix, stored as sorted variable indices per check.
// Regular-ensemble metadata is filled by build_regular; matrices from other
// sources (turbo duals, alist files) may be irregular.
struct ParityCheckMatrix {
    size_t n = 0;  // variables / block length
    size_t m = 0;  // checks
    std::vector<std::vector<uint32_t>> rows;

    size_t dv = 0;  // column weight when regular, else 0
    size_t dc = 0;  // row weight when regular, else 0
    size_t four_cycles = 0;
    size_t girth_target = 0;

    bool is_regular() const { return dv > 0 && dc > 0; }
    double design_rate() const {
        return 1.0 - static_cast<double>(m) / static_cast<double>(n);
    }
    size_t edge_count() const;
};

// Random regular (dv, dc) ensemble via stub matching, followed by swap
// passes that remove parallel edges and, for girth_target >= 6, 4-cycles.
// Residual 4-cycles are reported in the result, not fatal; exhausting the
// retry budget on parallel edges is.
ParityCheckMatrix build_regular(size_t n, size_t dv, size_t dc, size_t girth_target, Rng &rng);

// H * x over GF(2).
BitVec syndrome(const ParityCheckMatrix &H, const BitVec &x);

size_t count_four_cycles(const ParityCheckMatrix &H);
size_t gf2_rank(const ParityCheckMatrix &H);

struct BpDecodeTrace {
    size_t iterations_used = 0;
    bool converged = false;
    size_t residual_unsatisfied_checks = 0;
    std::vector<BitVec> per_iteration_estimates;  // filled when requested
};

struct BpOptions {
    size_t max_iter = 50;
    double llr_clip = 25.0;           // symmetric LLR clipping
    bool early_stop = true;           // false pins the iteration count (timing probes)
    bool record_iterations = false;   // keep the hard decision after every iteration
};

// Flooding sum-product decoder on the syndrome-adjusted Tanner graph.
// Reusable across decodes of the same matrix; the matrix itself stays
// immutable and shareable, one decoder instance serves one decode at a time.
class BpDecoder {
   public:
    explicit BpDecoder(const ParityCheckMatrix &H);

    std::pair<BitVec, BpDecodeTrace> decode(const BitVec &z, double prior_flip,
                                            const BpOptions &opts);

    const ParityCheckMatrix &matrix() const { return H_; }

    // Posterior LLRs after the last decode, for the marginal oracle tests.
    const std::vector<double> &posterior_llrs() const { return posterior_; }

   private:
    const ParityCheckMatrix &H_;
    size_t dcmax_ = 0;
    size_t dvmax_ = 0;
    size_t mpad_ = 0;
    size_t npad_ = 0;
    std::vector<uint32_t> check_slot_to_var_slot_;  // plane index map, check -> var
    std::vector<uint32_t> check_slot_index_;        // plane indices of real check slots
    std::vector<uint32_t> check_pad_slots_;         // padded slots inside real checks
    std::vector<double> vc_;     // variable->check messages, check planes
    std::vector<double> tanh_;   // tanh buffer, check planes
    std::vector<double> prod_;   // exclusive products, check planes
    std::vector<double> cv_;     // check->variable messages, variable planes
    std::vector<double> sum_;    // exclusive sums, variable planes
    std::vector<double> msg_;    // outgoing variable messages, variable planes
    std::vector<double> prior_;
    std::vector<double> posterior_;
    std::vector<double> sign_;
};

// One-shot convenience wrapper around BpDecoder.
std::pair<BitVec, BpDecodeTrace> bp_syndrome_decode(const ParityCheckMatrix &H, const BitVec &z,
                                                    double prior_flip, size_t max_iter);
std::pair<BitVec, BpDecodeTrace> bp_syndrome_decode(const ParityCheckMatrix &H, const BitVec &z,
                                                    double prior_flip, const BpOptions &opts);

// MacKay alist interchange format.
void write_alist(const ParityCheckMatrix &H, std::ostream &out);
ParityCheckMatrix read_alist(std::istream &in);
void write_alist_file(const ParityCheckMatrix &H, const std::string &path);
ParityCheckMatrix read_alist_file(const std::string &path);

}  // namespace qkdrec
