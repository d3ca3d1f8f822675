// Command-line experiment runner: BB84 over an intercept-resend plus
// depolarizing channel stack, Slepian-Wolf reconciliation with turbo or LDPC
// codecs, CSV sweeps and plot-ready series files.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdrec/bb84.hpp"
#include "qkdrec/experiment.hpp"
#include "qkdrec/kernels.hpp"
#include "qkdrec/ldpc.hpp"
#include "qkdrec/metrics.hpp"
#include "qkdrec/presets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSelfCheck = 4;

struct CliOverrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> keys;
};

void add_config_flags(CLI::App *cmd, CliOverrides &ov) {
    cmd->add_option("--config", ov.config_path, "Config file (key = value lines)");
    auto add_key = [cmd, &ov](const std::string &flag, const std::string &key,
                              const std::string &help) {
        cmd->add_option_function<std::string>(
            flag, [&ov, key](const std::string &v) { ov.keys.emplace_back(key, v); }, help);
    };
    add_key("--seed", "master_seed", "Master seed (all randomness derives from it)");
    add_key("--out", "output_path", "Output CSV path");
    add_key("--preset", "codec_preset", "Codec preset name(s), comma separated");
    add_key("--p", "p_grid", "Depolarizing probability grid, comma separated");
    add_key("--s", "s_grid", "Intercept probability grid, comma separated");
    add_key("--n-qubits", "n_qubits", "Qubits per exchange");
    add_key("--trials", "trials", "Trials per grid point");
    add_key("--iterations", "iterations", "Decoder iterations (0 = codec default)");
    add_key("--iteration-grid", "iteration_grid", "Iteration counts for sweep-iterations");
    add_key("--interleaver", "interleaver_kind", "uniform and/or structured");
    add_key("--workers", "workers", "Worker threads");
    add_key("--timing", "timing", "on/off: emit real wall_ms (breaks byte determinism)");
    add_key("--disclose-fraction", "disclose_fraction", "Estimation disclosure fraction");
    add_key("--prior-source", "prior_source", "analytic or estimated");
}

qkdrec::ExperimentConfig build_config(const CliOverrides &ov) {
    qkdrec::ExperimentConfig cfg;
    if (!ov.config_path.empty()) {
        cfg = qkdrec::ExperimentConfig::from_file(ov.config_path);
    }
    for (const auto &[key, value] : ov.keys) {
        cfg.set_key(key, value);
    }
    cfg.validate();
    return cfg;
}

int cmd_sweep(const CliOverrides &ov, qkdrec::SweepMode mode) {
    const auto cfg = build_config(ov);
    const auto result = qkdrec::run_sweep(cfg, mode);
    std::cout << result.summary;
    if (!cfg.output_path.empty()) {
        std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_path << "\n";
    }
    return kExitOk;
}

int cmd_codes(bool with_rank) {
    for (const auto &p : qkdrec::codec_presets()) {
        auto codec = qkdrec::make_codec(p.name, 1, qkdrec::InterleaverKind::UniformRandom);
        std::printf("%-8s %s\n", p.name.c_str(), p.summary.c_str());
        std::printf("         block_n=%zu syndrome=%zu exact_rate=%s leak_rate=%s\n",
                    codec->block_len(), codec->syndrome_len(),
                    qkdrec::format_double(codec->code_rate()).c_str(),
                    qkdrec::format_double(static_cast<double>(codec->syndrome_len()) /
                                          static_cast<double>(codec->block_len()))
                        .c_str());
        if (p.family == qkdrec::CodecPreset::Family::Ldpc) {
            qkdrec::Rng rng(qkdrec::derive_seed(1, "code:" + p.name));
            const auto H = qkdrec::build_regular(p.n, p.dv, p.dc, p.girth_target, rng);
            std::printf("         dv=%zu dc=%zu four_cycles=%zu", p.dv, p.dc, H.four_cycles);
            if (with_rank) {
                std::printf(" rank=%zu (of %zu checks)", qkdrec::gf2_rank(H), H.m);
            }
            std::printf("\n");
        }
    }
    return kExitOk;
}

bool check(bool ok, const char *what) {
    std::printf("%-52s %s\n", what, ok ? "PASS" : "FAIL");
    return ok;
}

// Fast oracle self-checks, a subset of the full test suite that a deployment
// can run in seconds.
int cmd_validate(uint64_t seed) {
    using namespace qkdrec;
    bool all = true;

    {
        bool ok = compose(Pauli::X, Pauli::Z) == Pauli::Y && compose(Pauli::X, Pauli::X) == Pauli::I;
        const Pauli ps[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
        for (Pauli a : ps) {
            ok = ok && compose(a, Pauli::I) == a && compose(a, a) == Pauli::I;
            for (Pauli b : ps) {
                for (Basis beta : {Basis::Rectilinear, Basis::Diagonal}) {
                    ok = ok && measurement_flip(compose(a, b), beta) ==
                                   (measurement_flip(a, beta) != measurement_flip(b, beta));
                }
            }
        }
        all &= check(ok, "pauli algebra (composition, flip XOR law)");
    }
    {
        const auto &sc = kernels::scalar_table();
        bool ok = true;
        Rng rng(seed);
        std::vector<double> x(1025);
        std::vector<double> a(x.size());
        std::vector<double> b(x.size());
        for (auto &v : x) {
            v = (rng.next_double() - 0.5) * 50.0;
        }
        sc.tanh_half(a.data(), x.data(), x.size());
        for (size_t i = 0; i < x.size(); ++i) {
            ok = ok && std::abs(a[i] - std::tanh(x[i] / 2)) <= 1e-14;
        }
        if (const auto *av = kernels::avx2_table()) {
            av->tanh_half(b.data(), x.data(), x.size());
            for (size_t i = 0; i < x.size(); ++i) {
                ok = ok && a[i] == b[i];
            }
        }
        all &= check(ok, "kernels (tanh accuracy, scalar/simd equivalence)");
    }
    {
        Rng rng(derive_seed(seed, "depol"));
        size_t counts[4] = {0, 0, 0, 0};
        const size_t draws = 100000;
        const double p = 0.3;
        for (size_t i = 0; i < draws; ++i) {
            PauliFrame f;
            f = apply_depolarizing(f, DepolarizingParams{p}, rng);
            ++counts[static_cast<size_t>(f.error)];
        }
        const double expect[4] = {draws * (1 - p), draws * p / 3, draws * p / 3, draws * p / 3};
        double chi2 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double d = static_cast<double>(counts[i]) - expect[i];
            chi2 += d * d / expect[i];
        }
        all &= check(chi2 < 11.3449, "depolarizing channel chi-square at 1%");
    }
    {
        bool ok = secret_info_bound(0.0) == 1.0 && secret_info_bound(1.0) == 1.0 &&
                  secret_info_bound(0.5) == 0.0;
        ok = ok && std::abs(secret_info_bound(0.11) - 0.50008404183547200) < 1e-12;
        all &= check(ok, "secret-information bound boundary values");
    }
    {
        Rng rng(derive_seed(seed, "bb84"));
        const auto pair = run_exchange(20000, ChannelStack::standard(0.0, 0.0), rng);
        bool ok = pair.alice_bits == pair.bob_bits;
        const double kept = static_cast<double>(pair.size()) / 20000.0;
        ok = ok && kept > 0.47 && kept < 0.53;
        all &= check(ok, "bb84 identity channel (exact agreement, ~1/2 kept)");
    }
    {
        Rng rng(derive_seed(seed, "toy"));
        auto H = build_regular(12, 2, 4, 6, rng);
        bool ok = H.m == 6 && H.four_cycles == 0;
        BitVec e(12);
        e.set(3, true);
        const auto [est, trace] = bp_syndrome_decode(H, syndrome(H, e), 0.05, 50);
        ok = ok && trace.converged && est == e;
        all &= check(ok, "toy LDPC syndrome decode (weight-1 recovery)");
    }
    {
        auto codec = make_codec("turbo1", seed, InterleaverKind::UniformRandom);
        Rng rng(derive_seed(seed, "turbo"));
        BitVec e(codec->block_len());
        for (size_t i = 0; i < 40; ++i) {
            e.set(static_cast<size_t>(rng.next_below(e.size())), true);
        }
        auto out = codec->decode(codec->compute_syndrome(e), 0.02, 10, false);
        all &= check(out.claimed_success && out.estimate == e,
                     "turbo1 syndrome decode (sparse pattern recovery)");
    }

    return all ? kExitOk : kExitSelfCheck;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"QKD reconciliation simulator (BB84 + Slepian-Wolf syndrome coding)"};
    app.require_subcommand(1);

    std::string kernel_backend = "auto";
    app.add_option("--kernel", kernel_backend, "Kernel backend: auto, scalar, avx2");

    CliOverrides ov_simulate;
    CliOverrides ov_sweep;
    CliOverrides ov_sweep_it;

    auto *simulate = app.add_subcommand("simulate", "Run a single (p, s) grid point");
    add_config_flags(simulate, ov_simulate);
    auto *sweep = app.add_subcommand("sweep", "Run the full grid and write a CSV");
    add_config_flags(sweep, ov_sweep);
    auto *sweep_it = app.add_subcommand(
        "sweep-iterations", "Sweep with per-iteration residual QBER columns");
    add_config_flags(sweep_it, ov_sweep_it);

    std::string pd_csv;
    std::string pd_fig;
    std::string pd_out_dir = "plotdata";
    auto *plotdata = app.add_subcommand("plotdata", "Emit per-curve series files from a CSV");
    plotdata->add_option("--csv", pd_csv, "Input sweep CSV")->required();
    plotdata->add_option("--figure", pd_fig, "fig4, fig5, fig6 or fig7")->required();
    plotdata->add_option("--out-dir", pd_out_dir, "Output directory");

    bool codes_rank = false;
    auto *codes = app.add_subcommand("codes", "List codec presets and their parameters");
    codes->add_flag("--rank", codes_rank, "Also compute GF(2) ranks (slow for ldpc2)");

    uint64_t validate_seed = 1;
    auto *validate = app.add_subcommand("validate", "Run oracle self-checks");
    validate->add_option("--seed", validate_seed, "Seed for the statistical checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!qkdrec::kernels::force_backend(kernel_backend)) {
            std::cerr << "kernel backend unavailable: " << kernel_backend << "\n";
            return kExitConfig;
        }
        if (simulate->parsed()) {
            return cmd_sweep(ov_simulate, qkdrec::SweepMode::Standard);
        }
        if (sweep->parsed()) {
            return cmd_sweep(ov_sweep, qkdrec::SweepMode::Standard);
        }
        if (sweep_it->parsed()) {
            return cmd_sweep(ov_sweep_it, qkdrec::SweepMode::Iterations);
        }
        if (plotdata->parsed()) {
            const auto written =
                qkdrec::emit_plotdata(pd_csv, qkdrec::figure_from_string(pd_fig), pd_out_dir);
            for (const auto &path : written) {
                std::cout << path << "\n";
            }
            return kExitOk;
        }
        if (codes->parsed()) {
            return cmd_codes(codes_rank);
        }
        if (validate->parsed()) {
            return cmd_validate(validate_seed);
        }
    } catch (const qkdrec::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qkdrec::IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
