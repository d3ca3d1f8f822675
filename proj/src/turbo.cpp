#include "qkdrec/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qkdrec {

BitVec Interleaver::interleave(const BitVec &in) const {
    if (in.size() != permutation.size()) {
        throw std::invalid_argument("interleave: length mismatch");
    }
    BitVec out(in.size());
    for (size_t i = 0; i < permutation.size(); ++i) {
        out.set(i, in.get(permutation[i]));
    }
    return out;
}

BitVec Interleaver::deinterleave(const BitVec &in) const {
    if (in.size() != permutation.size()) {
        throw std::invalid_argument("deinterleave: length mismatch");
    }
    BitVec out(in.size());
    for (size_t i = 0; i < permutation.size(); ++i) {
        out.set(permutation[i], in.get(i));
    }
    return out;
}

void Interleaver::interleave(const double *in, double *out) const {
    for (size_t i = 0; i < permutation.size(); ++i) {
        out[i] = in[permutation[i]];
    }
}

void Interleaver::deinterleave(const double *in, double *out) const {
    for (size_t i = 0; i < permutation.size(); ++i) {
        out[permutation[i]] = in[i];
    }
}

Interleaver make_interleaver(InterleaverKind kind, size_t length, uint64_t seed) {
    if (length < 2) {
        throw std::invalid_argument("make_interleaver: length must be >= 2");
    }
    Interleaver il;
    il.kind = kind;
    il.seed = seed;
    il.permutation.resize(length);
    std::iota(il.permutation.begin(), il.permutation.end(), 0u);
    if (kind == InterleaverKind::UniformRandom) {
        Rng rng(seed);
        for (size_t i = length - 1; i > 0; --i) {
            const size_t j = static_cast<size_t>(rng.next_below(i + 1));
            std::swap(il.permutation[i], il.permutation[j]);
        }
    } else {
        // Fixed-stride spread: i -> (a*i + b) mod L with the stride fixed at
        // 16 (bumped minimally when not coprime with L) and offset b = L/2.
        // Every position is known in advance; the periodic banding it leaves
        // in the joint graph is the point of this proxy.
        auto gcd64 = [](uint64_t x, uint64_t y) {
            while (y != 0) {
                const uint64_t t = x % y;
                x = y;
                y = t;
            }
            return x;
        };
        uint64_t a = 16;
        while (gcd64(a, length) != 1) {
            ++a;
        }
        const uint64_t b = length / 2;
        for (size_t i = 0; i < length; ++i) {
            il.permutation[i] = static_cast<uint32_t>((a * i + b) % length);
        }
    }
    return il;
}

Interleaver make_interleaver(InterleaverKind kind, size_t length, Rng &rng) {
    return make_interleaver(kind, length, rng.next_u64());
}

void SerialTurboSpec::validate() const {
    outer.validate();
    inner.validate();
    if (block_len == 0) {
        throw std::invalid_argument("SerialTurboSpec: block_len must be >= 1");
    }
    if (!outer.zero_tail || !inner.zero_tail) {
        throw std::invalid_argument("SerialTurboSpec: components must be zero-tail terminated");
    }
    if (interleaver.size() != outer_output_len()) {
        throw std::invalid_argument(
            "SerialTurboSpec: interleaver length must equal the outer output length");
    }
}

BitVec serial_encode(const SerialTurboSpec &spec, const BitVec &u) {
    spec.validate();
    if (u.size() != spec.block_len) {
        throw std::invalid_argument("serial_encode: input length must equal block_len");
    }
    return conv_encode(spec.inner, spec.interleaver.interleave(conv_encode(spec.outer, u)));
}

BitVec serial_syndrome(const SerialTurboSpec &spec, const BitVec &x) {
    spec.validate();
    if (x.size() != spec.codeword_len()) {
        throw std::invalid_argument("serial_syndrome: length must equal the codeword length");
    }
    const auto inner_part = conv_info_syndrome(spec.inner, x);
    const auto outer_part =
        conv_info_syndrome(spec.outer, spec.interleaver.deinterleave(inner_part.info));
    BitVec z = inner_part.syn;
    z.append(outer_part.syn);
    return z;
}

BitVec serial_coset_embed(const SerialTurboSpec &spec, const BitVec &info, const BitVec &syn) {
    spec.validate();
    if (info.size() != spec.block_len) {
        throw std::invalid_argument("serial_coset_embed: info length must equal block_len");
    }
    if (syn.size() != spec.syndrome_len()) {
        throw std::invalid_argument("serial_coset_embed: syndrome length mismatch");
    }
    const size_t isl = spec.inner_syndrome_len();
    const BitVec syn_inner = syn.slice(0, isl);
    const BitVec syn_outer = syn.slice(isl, syn.size() - isl);
    const BitVec eps = conv_coset_embed(spec.outer, info, syn_outer);
    return conv_coset_embed(spec.inner, spec.interleaver.interleave(eps), syn_inner);
}

ParityCheckMatrix parity_check_of(const SerialTurboSpec &spec) {
    spec.validate();
    ParityCheckMatrix H;
    H.n = spec.codeword_len();
    H.m = spec.syndrome_len();
    H.rows.resize(H.m);
    BitVec unit(H.n);
    for (size_t j = 0; j < H.n; ++j) {
        unit.set(j, true);
        const BitVec col = serial_syndrome(spec, unit);
        unit.set(j, false);
        for (size_t r = 0; r < H.m; ++r) {
            if (col.get(r)) {
                H.rows[r].push_back(static_cast<uint32_t>(j));
            }
        }
    }
    return H;
}

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kLlrClamp = 60.0;
constexpr double kTinyMass = 1e-300;

double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

double llr_to_p1(double llr) { return 1.0 / (1.0 + std::exp(clamp_llr(llr))); }

double p_to_llr(double p1) { return std::log1p(-p1) - std::log(p1); }

// Forward-backward working set, reusable across iterations.
struct BcjrWork {
    std::vector<double> p1out;
    std::vector<double> pa1;
    std::vector<double> gamma;  // [step][state][input]
    std::vector<double> alpha;  // [step+1][state]
    std::vector<double> beta;
    std::vector<double> beta_prev;
    std::vector<double> in_post;   // LLR per info position
    std::vector<double> out_post;  // LLR per output position
};

// Exact MAP per position on the component trellis. out_llr: channel LLRs of
// the T*n output bits; in_llr: a-priori LLRs of the L free input bits (tail
// inputs are pinned to zero). Probability domain with per-step scaling.
void run_bcjr(const ConvTrellis &tr, size_t total_steps, size_t info_steps, size_t nout,
              bool terminated, const double *out_llr, const double *in_llr, BcjrWork &w) {
    const size_t S = tr.states;
    const size_t T = total_steps;
    const size_t L = info_steps;

    w.p1out.resize(T * nout);
    for (size_t i = 0; i < T * nout; ++i) {
        w.p1out[i] = llr_to_p1(out_llr[i]);
    }
    w.pa1.resize(L);
    for (size_t t = 0; t < L; ++t) {
        w.pa1[t] = llr_to_p1(in_llr[t]);
    }

    w.gamma.assign(T * S * 2, 0.0);
    for (size_t t = 0; t < T; ++t) {
        const double *pb = w.p1out.data() + t * nout;
        const size_t amax = t < L ? 1 : 0;
        for (size_t s = 0; s < S; ++s) {
            for (size_t a = 0; a <= amax; ++a) {
                double g = 1.0;
                if (t < L) {
                    g = a == 1 ? w.pa1[t] : 1.0 - w.pa1[t];
                }
                const uint32_t bits = tr.out_bits[s][a];
                for (size_t j = 0; j < nout; ++j) {
                    g *= ((bits >> j) & 1u) ? pb[j] : 1.0 - pb[j];
                }
                w.gamma[(t * S + s) * 2 + a] = g;
            }
        }
    }

    w.alpha.assign((T + 1) * S, 0.0);
    w.alpha[0] = 1.0;
    for (size_t t = 0; t < T; ++t) {
        const double *at = w.alpha.data() + t * S;
        double *an = w.alpha.data() + (t + 1) * S;
        const size_t amax = t < L ? 1 : 0;
        for (size_t s = 0; s < S; ++s) {
            if (at[s] == 0.0) {
                continue;
            }
            for (size_t a = 0; a <= amax; ++a) {
                an[tr.next[s][a]] += at[s] * w.gamma[(t * S + s) * 2 + a];
            }
        }
        double sum = 0.0;
        for (size_t s = 0; s < S; ++s) {
            sum += an[s];
        }
        const double scale = 1.0 / sum;
        for (size_t s = 0; s < S; ++s) {
            an[s] *= scale;
        }
    }

    w.beta.assign(S, 0.0);
    if (terminated) {
        w.beta[0] = 1.0;
    } else {
        std::fill(w.beta.begin(), w.beta.end(), 1.0 / static_cast<double>(S));
    }
    w.beta_prev.assign(S, 0.0);
    w.in_post.assign(L, 0.0);
    w.out_post.assign(T * nout, 0.0);

    std::vector<double> bit_mass(nout * 2, 0.0);
    for (size_t t = T; t-- > 0;) {
        const double *at = w.alpha.data() + t * S;
        const size_t amax = t < L ? 1 : 0;
        double in_mass[2] = {0.0, 0.0};
        std::fill(bit_mass.begin(), bit_mass.end(), 0.0);
        std::fill(w.beta_prev.begin(), w.beta_prev.end(), 0.0);
        for (size_t s = 0; s < S; ++s) {
            for (size_t a = 0; a <= amax; ++a) {
                const double g = w.gamma[(t * S + s) * 2 + a];
                const double gb = g * w.beta[tr.next[s][a]];
                w.beta_prev[s] += gb;
                const double mu = at[s] * gb;
                if (mu == 0.0) {
                    continue;
                }
                in_mass[a] += mu;
                const uint32_t bits = tr.out_bits[s][a];
                for (size_t j = 0; j < nout; ++j) {
                    bit_mass[j * 2 + ((bits >> j) & 1u)] += mu;
                }
            }
        }
        if (t < L) {
            w.in_post[t] = std::log(std::max(in_mass[0], kTinyMass)) -
                           std::log(std::max(in_mass[1], kTinyMass));
        }
        for (size_t j = 0; j < nout; ++j) {
            w.out_post[t * nout + j] = std::log(std::max(bit_mass[j * 2], kTinyMass)) -
                                       std::log(std::max(bit_mass[j * 2 + 1], kTinyMass));
        }
        double bsum = 0.0;
        for (size_t s = 0; s < S; ++s) {
            bsum += w.beta_prev[s];
        }
        const double bscale = 1.0 / bsum;
        for (size_t s = 0; s < S; ++s) {
            w.beta[s] = w.beta_prev[s] * bscale;
        }
    }
}

}  // namespace

SisoResult bcjr_siso(const ConvCodeSpec &spec, const std::vector<double> &channel_evidence,
                     const std::vector<double> &prior, const SisoConstraint &constraint) {
    spec.validate();
    if (channel_evidence.empty() || channel_evidence.size() % spec.n != 0) {
        throw std::invalid_argument("bcjr_siso: evidence length must be a positive multiple of n");
    }
    const size_t total_steps = channel_evidence.size() / spec.n;
    if (spec.zero_tail && total_steps < spec.memory) {
        throw std::invalid_argument("bcjr_siso: evidence shorter than the tail");
    }
    const size_t info_steps = total_steps - (spec.zero_tail ? spec.memory : 0);
    if (!prior.empty() && prior.size() != info_steps) {
        throw std::invalid_argument("bcjr_siso: prior length must equal the info length");
    }

    bool clamped = false;
    auto clamp_prob = [&clamped](double p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("bcjr_siso: probabilities must lie in [0, 1]");
        }
        if (p < kProbClamp) {
            clamped |= p != kProbClamp;
            return kProbClamp;
        }
        if (p > 1.0 - kProbClamp) {
            clamped |= p != 1.0 - kProbClamp;
            return 1.0 - kProbClamp;
        }
        return p;
    };

    // Syndrome mode reduces to codeword decoding on the coset translate:
    // flip the evidence along the zero-info coset representative, decode,
    // translate the posteriors back.
    BitVec e0(channel_evidence.size());
    if (constraint.mode == SisoConstraint::Mode::Syndrome) {
        if (constraint.syndrome.size() != spec.syndrome_len(info_steps)) {
            throw std::invalid_argument("bcjr_siso: component syndrome length mismatch");
        }
        e0 = conv_coset_embed(spec, BitVec(info_steps), constraint.syndrome);
    }

    std::vector<double> out_llr(channel_evidence.size());
    for (size_t j = 0; j < channel_evidence.size(); ++j) {
        const double p = clamp_prob(channel_evidence[j]);
        const double pc = e0.get(j) ? 1.0 - p : p;
        out_llr[j] = p_to_llr(pc);
    }
    std::vector<double> in_llr(info_steps, 0.0);
    for (size_t t = 0; t < prior.size(); ++t) {
        in_llr[t] = p_to_llr(clamp_prob(prior[t]));
    }

    const ConvTrellis tr = build_trellis(spec);
    BcjrWork work;
    run_bcjr(tr, total_steps, info_steps, spec.n, spec.zero_tail, out_llr.data(), in_llr.data(),
             work);

    SisoResult res;
    res.inputs_clamped = clamped;
    res.posterior_flip.resize(channel_evidence.size());
    res.extrinsic_flip.resize(channel_evidence.size());
    res.hard_estimate = BitVec(channel_evidence.size());
    for (size_t j = 0; j < channel_evidence.size(); ++j) {
        const double p1c = llr_to_p1(work.out_post[j]);
        const double p1e = e0.get(j) ? 1.0 - p1c : p1c;
        res.posterior_flip[j] = p1e;
        const double ext_p1c = llr_to_p1(work.out_post[j] - out_llr[j]);
        res.extrinsic_flip[j] = e0.get(j) ? 1.0 - ext_p1c : ext_p1c;
        res.hard_estimate.set(j, p1e > 0.5);
    }
    res.input_posterior_flip.resize(info_steps);
    res.input_extrinsic_flip.resize(info_steps);
    for (size_t t = 0; t < info_steps; ++t) {
        res.input_posterior_flip[t] = llr_to_p1(work.in_post[t]);
        res.input_extrinsic_flip[t] = llr_to_p1(work.in_post[t] - in_llr[t]);
    }
    return res;
}

std::pair<BitVec, TurboDecodeTrace> turbo_syndrome_decode(const SerialTurboSpec &spec,
                                                          const BitVec &z, double prior_flip,
                                                          const TurboDecodeOptions &opts) {
    spec.validate();
    if (z.size() != spec.syndrome_len()) {
        throw std::invalid_argument("turbo_syndrome_decode: syndrome length mismatch");
    }
    if (!(prior_flip > 0.0 && prior_flip < 0.5)) {
        throw std::invalid_argument("turbo_syndrome_decode: prior_flip must be in (0, 0.5)");
    }
    if (opts.iterations == 0) {
        throw std::invalid_argument("turbo_syndrome_decode: iterations must be >= 1");
    }

    const size_t K = spec.block_len;
    const size_t no = spec.outer_output_len();
    const size_t nc = spec.codeword_len();
    const BitVec e0 = serial_coset_embed(spec, BitVec(K), z);

    const double lambda = std::log1p(-prior_flip) - std::log(prior_flip);
    std::vector<double> chan_llr(nc);
    for (size_t j = 0; j < nc; ++j) {
        chan_llr[j] = e0.get(j) ? -lambda : lambda;
    }

    const ConvTrellis tr_inner = build_trellis(spec.inner);
    const ConvTrellis tr_outer = build_trellis(spec.outer);
    const size_t inner_steps = no + spec.inner.memory;
    const size_t outer_steps = K + spec.outer.memory;

    std::vector<double> apriori_w(no, 0.0);
    std::vector<double> ext_w(no);
    std::vector<double> outer_evidence(no);
    std::vector<double> ext_v(no);
    std::vector<double> outer_prior(K, 0.0);
    BcjrWork inner_work;
    BcjrWork outer_work;

    BitVec estimate(nc);
    TurboDecodeTrace trace;
    for (size_t it = 1; it <= opts.iterations; ++it) {
        run_bcjr(tr_inner, inner_steps, no, spec.inner.n, true, chan_llr.data(), apriori_w.data(),
                 inner_work);
        for (size_t i = 0; i < no; ++i) {
            ext_w[i] = clamp_llr(inner_work.in_post[i] - apriori_w[i]);
        }
        spec.interleaver.deinterleave(ext_w.data(), outer_evidence.data());

        run_bcjr(tr_outer, outer_steps, K, spec.outer.n, true, outer_evidence.data(),
                 outer_prior.data(), outer_work);
        for (size_t i = 0; i < no; ++i) {
            ext_v[i] = clamp_llr(outer_work.out_post[i] - outer_evidence[i]);
        }
        spec.interleaver.interleave(ext_v.data(), apriori_w.data());

        BitVec b_hat(K);
        for (size_t t = 0; t < K; ++t) {
            b_hat.set(t, outer_work.in_post[t] < 0.0);
        }
        estimate = serial_encode(spec, b_hat) ^ e0;
        trace.iterations_used = it;
        if (opts.record_iterations) {
            trace.per_iteration_estimates.push_back(estimate);
        }
    }
    trace.syndrome_consistent = serial_syndrome(spec, estimate) == z;
    return {estimate, trace};
}

std::pair<BitVec, TurboDecodeTrace> turbo_syndrome_decode(const SerialTurboSpec &spec,
                                                          const BitVec &z, double prior_flip,
                                                          size_t iterations) {
    TurboDecodeOptions opts;
    opts.iterations = iterations;
    return turbo_syndrome_decode(spec, z, prior_flip, opts);
}

}  // namespace qkdrec
