#include "qkdrec/conv.hpp"

#include <array>
#include <bit>
#include <stdexcept>

namespace qkdrec {

namespace {

uint32_t octal_to_mask(uint32_t octal, size_t memory) {
    // Octal generator notation: read as binary over memory+1 positions, the
    // most significant position being the current input (D^0 coefficient).
    // The window convention here puts the current input at bit 0, so the
    // literal is bit-reversed over that width.
    uint32_t value = 0;
    uint32_t digits[16];
    size_t count = 0;
    uint32_t rest = octal;
    do {
        digits[count++] = rest % 10;
        rest /= 10;
    } while (rest != 0);
    for (size_t i = count; i-- > 0;) {
        if (digits[i] > 7) {
            throw std::invalid_argument("conv taps: not an octal literal");
        }
        value = (value << 3) | digits[i];
    }
    const size_t width = memory + 1;
    if (value >> width) {
        throw std::invalid_argument("conv taps: literal wider than memory + 1 bits");
    }
    uint32_t reversed = 0;
    for (size_t b = 0; b < width; ++b) {
        if ((value >> b) & 1u) {
            reversed |= uint32_t{1} << (width - 1 - b);
        }
    }
    return reversed;
}

bool parity32(uint32_t v) { return (std::popcount(v) & 1) != 0; }

}  // namespace

void ConvCodeSpec::validate() const {
    if (k != 1) {
        throw std::invalid_argument("ConvCodeSpec: only k = 1 components are supported");
    }
    if (n == 0 || taps.size() != n) {
        throw std::invalid_argument("ConvCodeSpec: need one tap mask per output");
    }
    if (memory == 0 || memory > 24) {
        throw std::invalid_argument("ConvCodeSpec: memory must be in [1, 24]");
    }
    const uint32_t window = (uint32_t{1} << (memory + 1)) - 1;
    bool has_current_tap = false;
    for (uint32_t t : taps) {
        if (t == 0 || (t & ~window) != 0) {
            throw std::invalid_argument("ConvCodeSpec: tap mask outside the input window");
        }
        if (t == 1) {
            throw std::invalid_argument(
                "ConvCodeSpec: systematic output (verbatim input copy) not allowed");
        }
        if (t & 1u) {
            has_current_tap = true;
        }
    }
    if (!has_current_tap) {
        throw std::invalid_argument(
            "ConvCodeSpec: no output taps the current input; encoder is not invertible "
            "step by step");
    }
}

ConvCodeSpec conv_spec_from_octal(size_t memory, const std::vector<uint32_t> &octal_taps) {
    ConvCodeSpec spec;
    spec.k = 1;
    spec.n = octal_taps.size();
    spec.memory = memory;
    for (uint32_t o : octal_taps) {
        spec.taps.push_back(octal_to_mask(o, memory));
    }
    spec.validate();
    return spec;
}

BitVec conv_encode(const ConvCodeSpec &spec, const BitVec &u) {
    spec.validate();
    if (u.size() % spec.k != 0) {
        throw std::invalid_argument("conv_encode: input length must be a multiple of k");
    }
    const size_t steps = spec.steps(u.size());
    BitVec out(steps * spec.n);
    uint32_t window = 0;  // bit 0 = current input, bit i = input i steps back
    const auto wmask = static_cast<uint32_t>((uint32_t{1} << (spec.memory + 1)) - 1);
    for (size_t t = 0; t < steps; ++t) {
        const uint32_t a = t < u.size() ? static_cast<uint32_t>(u.get(t)) : 0;
        window = ((window << 1) | a) & wmask;
        for (size_t j = 0; j < spec.n; ++j) {
            out.set(t * spec.n + j, parity32(window & spec.taps[j]));
        }
    }
    return out;
}

namespace {

// Index of the first output whose tap touches the current input.
size_t selector_output(const ConvCodeSpec &spec) {
    for (size_t j = 0; j < spec.n; ++j) {
        if (spec.taps[j] & 1u) {
            return j;
        }
    }
    throw std::logic_error("selector_output: validate() should have rejected this spec");
}

}  // namespace

ConvInfoSyndrome conv_info_syndrome(const ConvCodeSpec &spec, const BitVec &e) {
    spec.validate();
    if (e.size() % spec.n != 0) {
        throw std::invalid_argument("conv_info_syndrome: length must be a multiple of n");
    }
    const size_t steps = e.size() / spec.n;
    if (spec.zero_tail && steps < spec.memory) {
        throw std::invalid_argument("conv_info_syndrome: block shorter than the tail");
    }
    const size_t info_len = steps - (spec.zero_tail ? spec.memory : 0);
    const size_t jstar = selector_output(spec);
    const auto wmask = static_cast<uint32_t>((uint32_t{1} << (spec.memory + 1)) - 1);

    ConvInfoSyndrome res;
    res.info = BitVec(info_len);
    res.syn = BitVec(e.size() - info_len);
    size_t syn_pos = 0;
    uint32_t state_window = 0;  // window with a zero current input
    for (size_t t = 0; t < steps; ++t) {
        state_window = (state_window << 1) & wmask;
        // Residual against the zero-input prediction; its selector coordinate
        // is the decoded input bit.
        const bool a_hat = e.get(t * spec.n + jstar) ^ parity32(state_window & spec.taps[jstar]);
        if (t < info_len) {
            res.info.set(t, a_hat);
        } else {
            res.syn.set(syn_pos++, a_hat);
        }
        const uint32_t full_window = state_window | static_cast<uint32_t>(a_hat);
        for (size_t j = 0; j < spec.n; ++j) {
            if (j == jstar) {
                continue;
            }
            const bool r = e.get(t * spec.n + j) ^ parity32(full_window & spec.taps[j]);
            res.syn.set(syn_pos++, r);
        }
        state_window |= static_cast<uint32_t>(a_hat);
    }
    return res;
}

BitVec conv_coset_embed(const ConvCodeSpec &spec, const BitVec &info, const BitVec &syn) {
    spec.validate();
    const size_t info_len = info.size();
    const size_t steps = spec.steps(info_len);
    if (syn.size() != spec.syndrome_len(info_len)) {
        throw std::invalid_argument("conv_coset_embed: syndrome length mismatch");
    }
    const size_t jstar = selector_output(spec);
    const auto wmask = static_cast<uint32_t>((uint32_t{1} << (spec.memory + 1)) - 1);

    BitVec e(steps * spec.n);
    size_t syn_pos = 0;
    uint32_t state_window = 0;
    for (size_t t = 0; t < steps; ++t) {
        state_window = (state_window << 1) & wmask;
        const bool a_hat = t < info_len ? info.get(t) : syn.get(syn_pos++);
        const uint32_t full_window = state_window | static_cast<uint32_t>(a_hat);
        e.set(t * spec.n + jstar, parity32(full_window & spec.taps[jstar]));
        for (size_t j = 0; j < spec.n; ++j) {
            if (j == jstar) {
                continue;
            }
            const bool r = syn.get(syn_pos++);
            e.set(t * spec.n + j, r ^ parity32(full_window & spec.taps[j]));
        }
        state_window |= static_cast<uint32_t>(a_hat);
    }
    return e;
}

ConvTrellis build_trellis(const ConvCodeSpec &spec) {
    spec.validate();
    ConvTrellis tr;
    tr.states = spec.state_count();
    tr.outputs = spec.n;
    tr.next.resize(tr.states);
    tr.out_bits.resize(tr.states);
    const auto smask = static_cast<uint32_t>(tr.states - 1);
    for (uint32_t s = 0; s < tr.states; ++s) {
        for (uint32_t a = 0; a < 2; ++a) {
            const uint32_t window = (s << 1) | a;
            uint32_t bits = 0;
            for (size_t j = 0; j < spec.n; ++j) {
                if (parity32(window & spec.taps[j])) {
                    bits |= uint32_t{1} << j;
                }
            }
            tr.next[s][a] = ((s << 1) | a) & smask;
            tr.out_bits[s][a] = bits;
        }
    }
    return tr;
}

}  // namespace qkdrec
