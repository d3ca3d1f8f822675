#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qkdrec/reconciler.hpp"
#include "qkdrec/turbo.hpp"

namespace qkdrec {

// Named code configurations. Block lengths for the turbo presets are chosen
// so every preset frames the sifted key into 3600-bit blocks, matching the
// ldpc1 block length for side-by-side comparisons.
struct CodecPreset {
    enum class Family { Ldpc, Turbo };

    std::string name;
    Family family = Family::Ldpc;

    // LDPC ensemble parameters.
    size_t n = 0;
    size_t dv = 0;
    size_t dc = 0;
    size_t girth_target = 6;

    // Turbo component parameters (two identical components).
    size_t component_n = 0;
    size_t component_memory = 0;
    std::vector<uint32_t> component_taps_octal;
    size_t info_block_len = 0;

    std::string summary;
};

const std::vector<CodecPreset> &codec_presets();
const CodecPreset &find_preset(const std::string &name);

// Builds a usable codec from a preset. Construction randomness (LDPC edges,
// random interleavers) derives from the master seed and the preset name, so
// a run is reproducible end to end from one seed.
std::unique_ptr<Codec> make_codec(const std::string &preset_name, uint64_t master_seed,
                                  InterleaverKind interleaver_kind);

std::unique_ptr<Codec> make_ldpc_codec(ParityCheckMatrix H);
std::unique_ptr<Codec> make_turbo_codec(SerialTurboSpec spec);

}  // namespace qkdrec
