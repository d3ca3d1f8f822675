#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qkdrec/bits.hpp"

namespace qkdrec {

// Feedforward (nonrecursive), nonsystematic convolutional component code.
// One tap mask per output bit, over the (memory + 1)-bit input window; bit 0
// of a mask is the current input, bit i the input i steps back. The
// representation has no feedback path, so recursiveness is unexpressible.
struct ConvCodeSpec {
    size_t k = 1;       // input bits per step; this codebase supports k = 1
    size_t n = 2;       // output bits per step
    size_t memory = 2;  // shift-register length
    std::vector<uint32_t> taps;
    bool zero_tail = true;

    double rate() const { return static_cast<double>(k) / static_cast<double>(n); }
    size_t state_count() const { return size_t{1} << memory; }

    // Output length for an input of `info_len` bits (tail included when on).
    size_t output_len(size_t info_len) const {
        return (info_len + (zero_tail ? memory : 0)) * n;
    }
    size_t steps(size_t info_len) const { return info_len + (zero_tail ? memory : 0); }

    // Per terminated block: output_len - info_len linearly independent checks.
    size_t syndrome_len(size_t info_len) const { return output_len(info_len) - info_len; }

    // Throws unless the spec is usable: k = 1, masks inside the window, no
    // output a verbatim copy of the input stream, and at least one output
    // tapping the current input (required by the coset transform).
    void validate() const;
};

ConvCodeSpec conv_spec_from_octal(size_t memory, const std::vector<uint32_t> &octal_taps);

// Zero-state feedforward convolution; appends memory flush steps when
// zero_tail is set. Input length must be a multiple of k.
BitVec conv_encode(const ConvCodeSpec &spec, const BitVec &u);

// Invertible per-block transform between an arbitrary word e of codeword
// length and (info, syndrome) coordinates:
//   - info: what the word looks like through the encoder's left inverse,
//   - syndrome: the residuals that vanish exactly on codewords.
// A shadow encoder replays e step by step; the residual against the
// predicted step output yields one decoded input bit (via an output that
// taps the current input) plus n-1 residual bits. Non-tail steps contribute
// their decoded bit to info; tail steps emit it as an extra syndrome bit
// since the true input is pinned to zero there.
struct ConvInfoSyndrome {
    BitVec info;
    BitVec syn;
};
ConvInfoSyndrome conv_info_syndrome(const ConvCodeSpec &spec, const BitVec &e);

// Inverse of conv_info_syndrome: the unique word with the given coordinates.
// conv_coset_embed(spec, u, 0) == conv_encode(spec, u).
BitVec conv_coset_embed(const ConvCodeSpec &spec, const BitVec &info, const BitVec &syn);

// Expanded trellis tables for the SISO decoder.
struct ConvTrellis {
    size_t states = 0;
    size_t outputs = 0;
    // Indexed [state][input]: successor state and packed output bits.
    std::vector<std::array<uint32_t, 2>> next;
    std::vector<std::array<uint32_t, 2>> out_bits;
};
ConvTrellis build_trellis(const ConvCodeSpec &spec);

}  // namespace qkdrec
