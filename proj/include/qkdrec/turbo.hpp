#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkdrec/bits.hpp"
#include "qkdrec/conv.hpp"
#include "qkdrec/ldpc.hpp"
#include "qkdrec/rng.hpp"

namespace qkdrec {

enum class InterleaverKind { UniformRandom, Structured };

// Block permutation between the outer codeword and the inner input.
// interleave: out[i] = in[perm[i]]; deinterleave inverts it.
struct Interleaver {
    InterleaverKind kind = InterleaverKind::UniformRandom;
    uint64_t seed = 0;
    std::vector<uint32_t> permutation;

    size_t size() const { return permutation.size(); }

    BitVec interleave(const BitVec &in) const;
    BitVec deinterleave(const BitVec &in) const;
    void interleave(const double *in, double *out) const;
    void deinterleave(const double *in, double *out) const;
};

// UniformRandom draws a Fisher-Yates permutation seeded as given. Structured
// is the deterministic fixed-stride spread (i -> (a*i + b) mod L with a the
// smallest stride >= sqrt(L) coprime to L and b = L/2): positions are known
// in advance, standing in for the error-structure-aware interleaver it
// proxies. Length must be >= 2.
Interleaver make_interleaver(InterleaverKind kind, size_t length, uint64_t seed);
Interleaver make_interleaver(InterleaverKind kind, size_t length, Rng &rng);

// Serial concatenation: inner_encode(interleave(outer_encode(u))).
struct SerialTurboSpec {
    ConvCodeSpec outer;
    ConvCodeSpec inner;
    Interleaver interleaver;
    size_t block_len = 0;  // info bits per block

    size_t outer_output_len() const { return outer.output_len(block_len); }
    size_t codeword_len() const { return inner.output_len(outer_output_len()); }
    size_t syndrome_len() const { return codeword_len() - block_len; }
    size_t inner_syndrome_len() const { return inner.syndrome_len(outer_output_len()); }
    double exact_rate() const {
        return static_cast<double>(block_len) / static_cast<double>(codeword_len());
    }

    void validate() const;
};

BitVec serial_encode(const SerialTurboSpec &spec, const BitVec &u);

// Streaming syndrome of the serial code: the residual coordinates of the
// invertible word <-> (info, syndrome) transform, inner residuals first,
// then outer residuals of the de-interleaved inner info part. Zero exactly
// on serial codewords; full rank by construction.
BitVec serial_syndrome(const SerialTurboSpec &spec, const BitVec &x);

// Unique word with the given info/syndrome coordinates; with info = 0 this
// is the coset representative used to translate syndrome decoding into
// codeword decoding.
BitVec serial_coset_embed(const SerialTurboSpec &spec, const BitVec &info, const BitVec &syn);

// Materialized dual-space matrix: row r is serial_syndrome applied to unit
// vectors. Quadratic in block size; meant for analysis and tests, while the
// decode path stays streaming.
ParityCheckMatrix parity_check_of(const SerialTurboSpec &spec);

// Soft-input soft-output forward-backward pass over one component trellis.
struct SisoConstraint {
    enum class Mode { Codeword, Syndrome };
    Mode mode = Mode::Codeword;
    BitVec syndrome;  // component syndrome bits in Syndrome mode
};

struct SisoResult {
    std::vector<double> posterior_flip;        // output positions
    std::vector<double> extrinsic_flip;        // output positions
    std::vector<double> input_posterior_flip;  // info positions
    std::vector<double> input_extrinsic_flip;  // info positions
    BitVec hard_estimate;                      // output positions, ties -> 0
    bool inputs_clamped = false;
};

// Exact per-position MAP over the component trellis. channel_evidence holds
// per-output-position flip probabilities, prior per-input-position flip
// probabilities (pass 0.5 for uniform). Degenerate probabilities are clamped
// to [1e-12, 1 - 1e-12] and flagged. In Syndrome mode the posteriors
// describe the error pattern restricted to the syndrome's coset.
SisoResult bcjr_siso(const ConvCodeSpec &spec, const std::vector<double> &channel_evidence,
                     const std::vector<double> &prior, const SisoConstraint &constraint);

struct TurboDecodeTrace {
    size_t iterations_used = 0;
    bool syndrome_consistent = false;
    std::vector<BitVec> per_iteration_estimates;  // always recorded, one per iteration
};

struct TurboDecodeOptions {
    size_t iterations = 10;
    bool record_iterations = true;
};

// Iterative serial decoder: inner SISO -> de-interleave -> outer SISO ->
// re-interleave, exchanging extrinsic information, initialized from the
// channel prior. Returns the hard error estimate after the final iteration.
std::pair<BitVec, TurboDecodeTrace> turbo_syndrome_decode(const SerialTurboSpec &spec,
                                                          const BitVec &z, double prior_flip,
                                                          const TurboDecodeOptions &opts);
std::pair<BitVec, TurboDecodeTrace> turbo_syndrome_decode(const SerialTurboSpec &spec,
                                                          const BitVec &z, double prior_flip,
                                                          size_t iterations);

}  // namespace qkdrec
