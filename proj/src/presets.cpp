#include "qkdrec/presets.hpp"

#include <stdexcept>

#include "qkdrec/ldpc.hpp"

namespace qkdrec {

namespace {

class LdpcCodec final : public Codec {
   public:
    LdpcCodec(std::string name, ParityCheckMatrix H) : name_(std::move(name)), H_(std::move(H)) {}

    const std::string &name() const override { return name_; }
    size_t block_len() const override { return H_.n; }
    size_t syndrome_len() const override { return H_.m; }
    size_t default_iterations() const override { return 50; }
    double code_rate() const override { return H_.design_rate(); }
    BitVec compute_syndrome(const BitVec &block) const override { return syndrome(H_, block); }

    DecodeOut decode(const BitVec &zeta, double prior_flip, size_t iterations,
                     bool record_iterations) const override {
        BpOptions opts;
        opts.max_iter = iterations;
        opts.record_iterations = record_iterations;
        auto [est, trace] = bp_syndrome_decode(H_, zeta, prior_flip, opts);
        DecodeOut out;
        out.estimate = std::move(est);
        out.claimed_success = trace.converged;
        out.iterations_used = trace.iterations_used;
        out.per_iteration_estimates = std::move(trace.per_iteration_estimates);
        return out;
    }

    const ParityCheckMatrix &matrix() const { return H_; }

   private:
    std::string name_;
    ParityCheckMatrix H_;
};

class TurboCodec final : public Codec {
   public:
    TurboCodec(std::string name, SerialTurboSpec spec)
        : name_(std::move(name)), spec_(std::move(spec)) {
        spec_.validate();
    }

    const std::string &name() const override { return name_; }
    size_t block_len() const override { return spec_.codeword_len(); }
    size_t syndrome_len() const override { return spec_.syndrome_len(); }
    size_t default_iterations() const override { return 10; }
    double code_rate() const override { return spec_.exact_rate(); }
    BitVec compute_syndrome(const BitVec &block) const override {
        return serial_syndrome(spec_, block);
    }

    DecodeOut decode(const BitVec &zeta, double prior_flip, size_t iterations,
                     bool record_iterations) const override {
        TurboDecodeOptions opts;
        opts.iterations = iterations;
        opts.record_iterations = record_iterations;
        auto [est, trace] = turbo_syndrome_decode(spec_, zeta, prior_flip, opts);
        DecodeOut out;
        out.estimate = std::move(est);
        out.claimed_success = trace.syndrome_consistent;
        out.iterations_used = trace.iterations_used;
        out.per_iteration_estimates = std::move(trace.per_iteration_estimates);
        return out;
    }

   private:
    std::string name_;
    SerialTurboSpec spec_;
};

}  // namespace

const std::vector<CodecPreset> &codec_presets() {
    static const std::vector<CodecPreset> presets = [] {
        std::vector<CodecPreset> v;

        CodecPreset ldpc1;
        ldpc1.name = "ldpc1";
        ldpc1.family = CodecPreset::Family::Ldpc;
        ldpc1.n = 3600;
        ldpc1.dv = 6;
        ldpc1.dc = 12;
        ldpc1.girth_target = 6;
        ldpc1.summary = "LDPC1(6,12): regular, n=3600, k=1800, R=1/2";
        v.push_back(ldpc1);

        CodecPreset ldpc2;
        ldpc2.name = "ldpc2";
        ldpc2.family = CodecPreset::Family::Ldpc;
        ldpc2.n = 8736;
        ldpc2.dv = 4;
        ldpc2.dc = 8;
        ldpc2.girth_target = 6;
        ldpc2.summary = "LDPC2(4,8): regular, n=8736, k=4368, R=1/2";
        v.push_back(ldpc2);

        CodecPreset turbo1;
        turbo1.name = "turbo1";
        turbo1.family = CodecPreset::Family::Turbo;
        turbo1.component_n = 3;
        turbo1.component_memory = 3;
        turbo1.component_taps_octal = {13, 15, 17};
        turbo1.info_block_len = 396;  // codeword 9*K + 36 = 3600
        turbo1.summary = "Turbo1: two rate-1/3 m=3 components (13,15,17), R -> 1/9, n=3600";
        v.push_back(turbo1);

        CodecPreset turbo2;
        turbo2.name = "turbo2";
        turbo2.family = CodecPreset::Family::Turbo;
        turbo2.component_n = 2;
        turbo2.component_memory = 4;
        turbo2.component_taps_octal = {23, 35};
        turbo2.info_block_len = 894;  // codeword 4*K + 24 = 3600
        turbo2.summary = "Turbo2: two rate-1/2 m=4 components (23,35), R -> 1/4, n=3600";
        v.push_back(turbo2);

        return v;
    }();
    return presets;
}

const CodecPreset &find_preset(const std::string &name) {
    for (const auto &p : codec_presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw std::invalid_argument("unknown codec preset: " + name);
}

std::unique_ptr<Codec> make_ldpc_codec(ParityCheckMatrix H) {
    return std::make_unique<LdpcCodec>("ldpc", std::move(H));
}

std::unique_ptr<Codec> make_turbo_codec(SerialTurboSpec spec) {
    return std::make_unique<TurboCodec>("turbo", std::move(spec));
}

std::unique_ptr<Codec> make_codec(const std::string &preset_name, uint64_t master_seed,
                                  InterleaverKind interleaver_kind) {
    const CodecPreset &p = find_preset(preset_name);
    if (p.family == CodecPreset::Family::Ldpc) {
        Rng rng(derive_seed(master_seed, "code:" + p.name));
        ParityCheckMatrix H = build_regular(p.n, p.dv, p.dc, p.girth_target, rng);
        return std::make_unique<LdpcCodec>(p.name, std::move(H));
    }
    SerialTurboSpec spec;
    spec.outer = conv_spec_from_octal(p.component_memory, p.component_taps_octal);
    spec.inner = spec.outer;  // two identical components
    spec.block_len = p.info_block_len;
    spec.interleaver =
        make_interleaver(interleaver_kind, spec.outer_output_len(),
                         derive_seed(master_seed, "interleaver:" + p.name,
                                     interleaver_kind == InterleaverKind::Structured ? 1 : 0));
    return std::make_unique<TurboCodec>(p.name, std::move(spec));
}

}  // namespace qkdrec
