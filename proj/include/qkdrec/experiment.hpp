#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qkdrec/reconciler.hpp"
#include "qkdrec/turbo.hpp"

namespace qkdrec {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sweep description. File form is flat `key = value` lines, '#' comments;
// unknown keys are hard errors so typos cannot silently change a run.
// Grid keys (p_grid, s_grid, codec_preset, interleaver_kind) take
// comma-separated lists; the sweep runs their cross product.
struct ExperimentConfig {
    size_t n_qubits = 200000;
    std::vector<double> p_grid{0.0};
    std::vector<double> s_grid{0.0};
    std::vector<std::string> codecs{"turbo1"};
    std::vector<InterleaverKind> interleavers{InterleaverKind::UniformRandom};
    size_t iterations = 0;  // 0 -> codec default
    std::vector<size_t> iteration_grid{2, 6, 10, 14};
    size_t trials = 20;
    uint64_t master_seed = 1;
    double disclose_fraction = 0.1;
    bool use_estimated_prior = false;  // default: analytic prior from (p, s)
    std::string output_path = "results.csv";
    size_t workers = 1;
    // Timing off keeps the CSV byte-identical across reruns; wall_ms is
    // emitted as 0 unless enabled.
    bool timing = false;

    static ExperimentConfig from_file(const std::string &path);
    void set_key(const std::string &key, const std::string &value);
    void validate() const;
};

struct ResultRow {
    double p = 0.0;
    double s = 0.0;
    std::string codec;
    size_t block_n = 0;
    size_t iterations = 0;
    std::string interleaver;
    size_t trial = 0;
    uint64_t seed = 0;
    double qber_pre = 0.0;
    double qber_post = 0.0;
    uint64_t leakage_bits = 0;
    double secret_bound_pre = 0.0;
    double secret_bound_post = 0.0;
    bool claimed_success = false;
    double wall_ms = 0.0;
    std::vector<double> qber_iters;  // per iteration_grid entry (iterations mode)
};

enum class SweepMode { Standard, Iterations };

struct SweepResult {
    std::vector<ResultRow> rows;
    std::string csv;      // exact bytes written to output_path
    std::string summary;  // per-point means and confidence half-widths
};

// Runs the full grid x trials, deterministically for a given config and
// master seed regardless of worker count, and writes the CSV atomically
// (skipped when output_path is empty).
SweepResult run_sweep(const ExperimentConfig &config, SweepMode mode = SweepMode::Standard);

enum class Figure { Fig4, Fig5, Fig6, Fig7 };
Figure figure_from_string(const std::string &name);

// Reads a sweep CSV and writes one whitespace-delimited series file per
// curve into out_dir. Returns the paths written.
std::vector<std::string> emit_plotdata(const std::string &csv_path, Figure figure,
                                       const std::string &out_dir);

// Shortest round-trip decimal representation; locale-independent.
std::string format_double(double v);

const char *to_string(InterleaverKind k);
InterleaverKind interleaver_kind_from_string(const std::string &name);

}  // namespace qkdrec
