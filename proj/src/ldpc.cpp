#include "qkdrec/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdrec/kernels.hpp"

namespace qkdrec {

size_t ParityCheckMatrix::edge_count() const {
    size_t e = 0;
    for (const auto &r : rows) {
        e += r.size();
    }
    return e;
}

namespace {

// (v1, v2) packed with v1 < v2; variable indices fit 32 bits.
uint64_t pair_key(uint32_t a, uint32_t b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<uint64_t>(a) << 32) | b;
}

// Collect all variable pairs that co-occur in >= 2 checks. Returns packed
// (key, check) entries sorted by key then check, so iteration order is
// deterministic for a given edge assignment.
std::vector<std::pair<uint64_t, uint32_t>> collect_pairs(const std::vector<uint32_t> &var_of,
                                                         size_t m, size_t dc) {
    std::vector<std::pair<uint64_t, uint32_t>> pairs;
    pairs.reserve(m * dc * (dc - 1) / 2);
    for (size_t c = 0; c < m; ++c) {
        const uint32_t *slot = var_of.data() + c * dc;
        for (size_t i = 0; i < dc; ++i) {
            for (size_t j = i + 1; j < dc; ++j) {
                pairs.emplace_back(pair_key(slot[i], slot[j]), static_cast<uint32_t>(c));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace

ParityCheckMatrix build_regular(size_t n, size_t dv, size_t dc, size_t girth_target, Rng &rng) {
    if (n == 0 || dv == 0 || dc == 0) {
        throw std::invalid_argument("build_regular: n, dv, dc must be positive");
    }
    if ((n * dv) % dc != 0) {
        throw std::invalid_argument("build_regular: n*dv must be divisible by dc");
    }
    if (dc > n) {
        throw std::invalid_argument("build_regular: row weight exceeds block length");
    }
    const size_t m = n * dv / dc;
    const size_t edges = n * dv;

    // Configuration model: dv stubs per variable, matched to check slots by a
    // uniform shuffle. var_of[c*dc + j] is the variable on slot j of check c.
    std::vector<uint32_t> var_of(edges);
    for (size_t v = 0; v < n; ++v) {
        for (size_t k = 0; k < dv; ++k) {
            var_of[v * dv + k] = static_cast<uint32_t>(v);
        }
    }
    for (size_t i = edges - 1; i > 0; --i) {
        const size_t j = static_cast<size_t>(rng.next_below(i + 1));
        std::swap(var_of[i], var_of[j]);
    }

    const size_t budget = 200;
    size_t pass = 0;
    for (; pass < budget; ++pass) {
        bool dirty = false;

        // Parallel edges: a variable occupying two slots of the same check.
        for (size_t c = 0; c < m; ++c) {
            uint32_t *slot = var_of.data() + c * dc;
            for (size_t i = 0; i < dc; ++i) {
                for (size_t j = i + 1; j < dc; ++j) {
                    if (slot[i] == slot[j]) {
                        const size_t other = static_cast<size_t>(rng.next_below(edges));
                        std::swap(var_of[c * dc + j], var_of[other]);
                        dirty = true;
                    }
                }
            }
        }

        if (!dirty && girth_target >= 6) {
            auto pairs = collect_pairs(var_of, m, dc);
            for (size_t i = 0; i + 1 < pairs.size(); ++i) {
                if (pairs[i].first != pairs[i + 1].first) {
                    continue;
                }
                // Break the cycle by rewiring one edge of the later check.
                const uint32_t c = pairs[i + 1].second;
                const auto va = static_cast<uint32_t>(pairs[i + 1].first >> 32);
                uint32_t *slot = var_of.data() + static_cast<size_t>(c) * dc;
                for (size_t j = 0; j < dc; ++j) {
                    if (slot[j] == va) {
                        const size_t other = static_cast<size_t>(rng.next_below(edges));
                        std::swap(slot[j], var_of[other]);
                        dirty = true;
                        break;
                    }
                }
            }
        }

        if (!dirty) {
            break;
        }
    }

    // Parallel edges are a hard structural requirement.
    for (size_t c = 0; c < m; ++c) {
        uint32_t *slot = var_of.data() + c * dc;
        for (size_t i = 0; i < dc; ++i) {
            for (size_t j = i + 1; j < dc; ++j) {
                if (slot[i] == slot[j]) {
                    throw std::runtime_error(
                        "build_regular: retry budget exhausted with parallel edges left");
                }
            }
        }
    }

    ParityCheckMatrix H;
    H.n = n;
    H.m = m;
    H.dv = dv;
    H.dc = dc;
    H.girth_target = girth_target;
    H.rows.resize(m);
    for (size_t c = 0; c < m; ++c) {
        auto &row = H.rows[c];
        row.assign(var_of.begin() + static_cast<long>(c * dc),
                   var_of.begin() + static_cast<long>((c + 1) * dc));
        std::sort(row.begin(), row.end());
    }
    H.four_cycles = count_four_cycles(H);
    return H;
}

size_t count_four_cycles(const ParityCheckMatrix &H) {
    std::vector<uint64_t> keys;
    for (const auto &row : H.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            for (size_t j = i + 1; j < row.size(); ++j) {
                keys.push_back(pair_key(row[i], row[j]));
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    size_t cycles = 0;
    size_t run = 1;
    for (size_t i = 1; i <= keys.size(); ++i) {
        if (i < keys.size() && keys[i] == keys[i - 1]) {
            ++run;
        } else {
            cycles += run * (run - 1) / 2;
            run = 1;
        }
    }
    return cycles;
}

BitVec syndrome(const ParityCheckMatrix &H, const BitVec &x) {
    if (x.size() != H.n) {
        throw std::invalid_argument("syndrome: input length must equal block length");
    }
    BitVec z(H.m);
    for (size_t c = 0; c < H.m; ++c) {
        bool parity = false;
        for (uint32_t v : H.rows[c]) {
            parity ^= x.get(v);
        }
        z.set(c, parity);
    }
    return z;
}

size_t gf2_rank(const ParityCheckMatrix &H) {
    const size_t words = (H.n + 63) / 64;
    std::vector<std::vector<uint64_t>> rows(H.m, std::vector<uint64_t>(words, 0));
    for (size_t c = 0; c < H.m; ++c) {
        for (uint32_t v : H.rows[c]) {
            rows[c][v >> 6] ^= uint64_t{1} << (v & 63);
        }
    }
    size_t rank = 0;
    for (size_t col = 0; col < H.n && rank < H.m; ++col) {
        const size_t w = col >> 6;
        const uint64_t mask = uint64_t{1} << (col & 63);
        size_t pivot = rank;
        while (pivot < H.m && (rows[pivot][w] & mask) == 0) {
            ++pivot;
        }
        if (pivot == H.m) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (size_t r = 0; r < H.m; ++r) {
            if (r != rank && (rows[r][w] & mask) != 0) {
                for (size_t k = w; k < words; ++k) {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        ++rank;
    }
    return rank;
}

BpDecoder::BpDecoder(const ParityCheckMatrix &H) : H_(H) {
    for (const auto &row : H.rows) {
        dcmax_ = std::max(dcmax_, row.size());
    }
    std::vector<uint32_t> var_degree(H.n, 0);
    for (const auto &row : H.rows) {
        for (uint32_t v : row) {
            ++var_degree[v];
        }
    }
    dvmax_ = 0;
    for (auto d : var_degree) {
        dvmax_ = std::max<size_t>(dvmax_, d);
    }
    const size_t lanes = 8;
    mpad_ = (H.m + lanes - 1) / lanes * lanes;
    npad_ = (H.n + lanes - 1) / lanes * lanes;

    std::vector<uint32_t> var_fill(H.n, 0);
    check_slot_to_var_slot_.reserve(H.edge_count());
    check_slot_index_.reserve(H.edge_count());
    for (size_t c = 0; c < H.m; ++c) {
        const auto &row = H.rows[c];
        for (size_t j = 0; j < dcmax_; ++j) {
            const auto plane_idx = static_cast<uint32_t>(j * mpad_ + c);
            if (j < row.size()) {
                const uint32_t v = row[j];
                check_slot_index_.push_back(plane_idx);
                check_slot_to_var_slot_.push_back(
                    static_cast<uint32_t>(var_fill[v] * npad_ + v));
                ++var_fill[v];
            } else {
                check_pad_slots_.push_back(plane_idx);
            }
        }
    }

    vc_.assign(dcmax_ * mpad_, 0.0);
    tanh_.assign(dcmax_ * mpad_, 0.0);
    prod_.assign(dcmax_ * mpad_, 0.0);
    cv_.assign(dvmax_ * npad_, 0.0);
    sum_.assign(dvmax_ * npad_, 0.0);
    msg_.assign(dvmax_ * npad_, 0.0);
    prior_.assign(npad_, 0.0);
    posterior_.assign(npad_, 0.0);
    sign_.assign(mpad_, 1.0);
}

std::pair<BitVec, BpDecodeTrace> BpDecoder::decode(const BitVec &z, double prior_flip,
                                                   const BpOptions &opts) {
    if (z.size() != H_.m) {
        throw std::invalid_argument("bp_syndrome_decode: syndrome length must equal check count");
    }
    if (!(prior_flip > 0.0 && prior_flip < 0.5)) {
        throw std::invalid_argument("bp_syndrome_decode: prior_flip must be in (0, 0.5)");
    }
    if (opts.max_iter == 0) {
        throw std::invalid_argument("bp_syndrome_decode: max_iter must be >= 1");
    }

    const auto &k = kernels::active();
    const size_t edge_cnt = check_slot_index_.size();
    const double lambda = std::log1p(-prior_flip) - std::log(prior_flip);

    std::fill(prior_.begin(), prior_.end(), 0.0);
    std::fill(prior_.begin(), prior_.begin() + static_cast<long>(H_.n), lambda);
    std::fill(vc_.begin(), vc_.end(), 0.0);
    for (uint32_t idx : check_slot_index_) {
        vc_[idx] = lambda;
    }
    std::fill(cv_.begin(), cv_.end(), 0.0);
    for (size_t c = 0; c < mpad_; ++c) {
        sign_[c] = (c < H_.m && z.get(c)) ? -1.0 : 1.0;
    }

    BitVec estimate(H_.n);
    BpDecodeTrace trace;

    for (size_t it = 1; it <= opts.max_iter; ++it) {
        // Check pass: tanh transform, syndrome-signed exclusive products.
        k.tanh_half(tanh_.data(), vc_.data(), dcmax_ * mpad_);
        for (uint32_t idx : check_pad_slots_) {
            tanh_[idx] = 1.0;
        }
        k.plane_excl_product(prod_.data(), tanh_.data(), dcmax_, mpad_);
        for (size_t r = 0; r < dcmax_; ++r) {
            k.mul(prod_.data() + r * mpad_, prod_.data() + r * mpad_, sign_.data(), mpad_);
        }
        k.atanh2_clip(prod_.data(), prod_.data(), dcmax_ * mpad_, opts.llr_clip);
        for (size_t e = 0; e < edge_cnt; ++e) {
            cv_[check_slot_to_var_slot_[e]] = prod_[check_slot_index_[e]];
        }

        // Variable pass: exclusive sums plus prior, clipped.
        k.plane_excl_sum(sum_.data(), cv_.data(), dvmax_, npad_);
        for (size_t r = 0; r < dvmax_; ++r) {
            k.add_clip(msg_.data() + r * npad_, sum_.data() + r * npad_, prior_.data(), npad_,
                       opts.llr_clip);
        }
        k.plane_sum(posterior_.data(), cv_.data(), dvmax_, npad_);
        k.add_clip(posterior_.data(), posterior_.data(), prior_.data(), npad_, 1e300);
        for (size_t e = 0; e < edge_cnt; ++e) {
            vc_[check_slot_index_[e]] = msg_[check_slot_to_var_slot_[e]];
        }

        // Harden (ties resolve to 0) and test the syndrome.
        for (size_t v = 0; v < H_.n; ++v) {
            estimate.set(v, posterior_[v] < 0.0);
        }
        size_t unsatisfied = 0;
        for (size_t c = 0; c < H_.m; ++c) {
            bool parity = false;
            for (uint32_t v : H_.rows[c]) {
                parity ^= estimate.get(v);
            }
            if (parity != z.get(c)) {
                ++unsatisfied;
            }
        }
        trace.iterations_used = it;
        trace.residual_unsatisfied_checks = unsatisfied;
        trace.converged = unsatisfied == 0;
        if (opts.record_iterations) {
            trace.per_iteration_estimates.push_back(estimate);
        }
        // Recording mode runs the full schedule so every iteration has an entry.
        if (trace.converged && opts.early_stop && !opts.record_iterations) {
            break;
        }
    }
    return {estimate, trace};
}

std::pair<BitVec, BpDecodeTrace> bp_syndrome_decode(const ParityCheckMatrix &H, const BitVec &z,
                                                    double prior_flip, const BpOptions &opts) {
    BpDecoder dec(H);
    return dec.decode(z, prior_flip, opts);
}

std::pair<BitVec, BpDecodeTrace> bp_syndrome_decode(const ParityCheckMatrix &H, const BitVec &z,
                                                    double prior_flip, size_t max_iter) {
    BpOptions opts;
    opts.max_iter = max_iter;
    return bp_syndrome_decode(H, z, prior_flip, opts);
}

}  // namespace qkdrec
