#include "qkdrec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "qkdrec/bb84.hpp"
#include "qkdrec/metrics.hpp"
#include "qkdrec/presets.hpp"

namespace qkdrec {

namespace {

std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string &s) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw ConfigError("trailing characters in number: " + s);
        }
        return v;
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &) {
        throw ConfigError("not a number: " + s);
    }
}

uint64_t parse_u64(const std::string &s) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ConfigError("not a non-negative integer: " + s);
    }
    return v;
}

std::vector<double> parse_double_list(const std::string &s) {
    std::vector<double> out;
    for (const auto &tok : split(s, ',')) {
        if (!tok.empty()) {
            out.push_back(parse_double(tok));
        }
    }
    return out;
}

bool parse_bool(const std::string &s) {
    if (s == "on" || s == "true" || s == "1") {
        return true;
    }
    if (s == "off" || s == "false" || s == "0") {
        return false;
    }
    throw ConfigError("expected on/off: " + s);
}

}  // namespace

const char *to_string(InterleaverKind k) {
    return k == InterleaverKind::UniformRandom ? "uniform" : "structured";
}

InterleaverKind interleaver_kind_from_string(const std::string &name) {
    if (name == "uniform" || name == "uniform-random" || name == "random") {
        return InterleaverKind::UniformRandom;
    }
    if (name == "structured") {
        return InterleaverKind::Structured;
    }
    throw ConfigError("unknown interleaver kind: " + name);
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buf, p);
}

void ExperimentConfig::set_key(const std::string &key, const std::string &value) {
    if (key == "n_qubits") {
        n_qubits = parse_u64(value);
    } else if (key == "p_grid") {
        p_grid = parse_double_list(value);
    } else if (key == "s_grid") {
        s_grid = parse_double_list(value);
    } else if (key == "codec_preset") {
        codecs.clear();
        for (const auto &tok : split(value, ',')) {
            if (!tok.empty()) {
                codecs.push_back(tok);
            }
        }
    } else if (key == "interleaver_kind") {
        interleavers.clear();
        for (const auto &tok : split(value, ',')) {
            if (!tok.empty()) {
                interleavers.push_back(interleaver_kind_from_string(tok));
            }
        }
    } else if (key == "iterations") {
        iterations = parse_u64(value);
    } else if (key == "iteration_grid") {
        iteration_grid.clear();
        for (const auto &tok : split(value, ',')) {
            if (!tok.empty()) {
                iteration_grid.push_back(parse_u64(tok));
            }
        }
    } else if (key == "trials") {
        trials = parse_u64(value);
    } else if (key == "master_seed") {
        master_seed = parse_u64(value);
    } else if (key == "disclose_fraction") {
        disclose_fraction = parse_double(value);
    } else if (key == "prior_source") {
        if (value == "analytic") {
            use_estimated_prior = false;
        } else if (value == "estimated") {
            use_estimated_prior = true;
        } else {
            throw ConfigError("prior_source must be analytic or estimated");
        }
    } else if (key == "output_path") {
        output_path = value;
    } else if (key == "workers") {
        workers = parse_u64(value);
    } else if (key == "timing") {
        timing = parse_bool(value);
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    ExperimentConfig cfg;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) {
            continue;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        cfg.set_key(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (n_qubits == 0) {
        throw ConfigError("n_qubits must be >= 1");
    }
    if (p_grid.empty() || s_grid.empty()) {
        throw ConfigError("p_grid and s_grid must be non-empty");
    }
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("p values must lie in [0, 1]");
        }
    }
    for (double s : s_grid) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ConfigError("s values must lie in [0, 1]");
        }
    }
    if (codecs.empty()) {
        throw ConfigError("codec_preset must name at least one preset");
    }
    for (const auto &c : codecs) {
        find_preset(c);  // throws on unknown preset
    }
    if (interleavers.empty()) {
        throw ConfigError("interleaver_kind must name at least one kind");
    }
    if (trials == 0) {
        throw ConfigError("trials must be >= 1");
    }
    if (!(disclose_fraction > 0.0 && disclose_fraction < 1.0)) {
        throw ConfigError("disclose_fraction must lie in (0, 1)");
    }
    if (iteration_grid.size() < 2) {
        throw ConfigError("iteration_grid needs at least two iteration counts");
    }
    for (size_t it : iteration_grid) {
        if (it == 0) {
            throw ConfigError("iteration counts must be >= 1");
        }
    }
}

namespace {

struct GridPoint {
    double p;
    double s;
    size_t codec_idx;
    size_t interleaver_idx;
    size_t point_index;
};

constexpr double kPriorFloor = 1e-4;
constexpr double kPriorCeil = 0.49;

ResultRow run_trial(const ExperimentConfig &cfg, SweepMode mode, const GridPoint &pt,
                    const Codec &codec, size_t trial) {
    ResultRow row;
    row.p = pt.p;
    row.s = pt.s;
    row.codec = cfg.codecs[pt.codec_idx];
    row.block_n = codec.block_len();
    row.interleaver = to_string(cfg.interleavers[pt.interleaver_idx]);
    row.trial = trial;
    row.seed = derive_seed(cfg.master_seed, pt.point_index, trial);

    Rng rng(row.seed);
    const ChannelStack stack = ChannelStack::standard(pt.p, pt.s);
    SiftedKeyPair pair = run_exchange(cfg.n_qubits, stack, rng);

    double prior_raw;
    if (cfg.use_estimated_prior) {
        EstimationResult est = estimate_parameters(pair, cfg.disclose_fraction, rng);
        prior_raw = est.qber_estimate;
        pair = std::move(est.remaining_pair);
    } else {
        prior_raw = analytic_sifted_qber(pt.p, pt.s);
    }
    const double prior = std::clamp(prior_raw, kPriorFloor, kPriorCeil);

    ReconcileOptions ropts;
    ropts.record_iteration_trace = mode == SweepMode::Iterations;
    if (mode == SweepMode::Iterations) {
        ropts.iterations = *std::max_element(cfg.iteration_grid.begin(), cfg.iteration_grid.end());
    } else {
        ropts.iterations = cfg.iterations;
    }
    const ReconciliationReport rep = reconcile(pair, codec, prior, ropts);

    row.iterations = ropts.iterations > 0 ? ropts.iterations : codec.default_iterations();
    row.qber_pre = rep.qber_before;
    row.qber_post = rep.qber_after;
    row.leakage_bits = rep.leakage_bits;
    row.secret_bound_pre = secret_info_bound(rep.qber_before);
    row.secret_bound_post = secret_info_bound(rep.qber_after);
    row.claimed_success = rep.claimed_success;
    row.wall_ms = cfg.timing ? rep.wall_seconds * 1e3 : 0.0;
    if (mode == SweepMode::Iterations) {
        for (size_t it : cfg.iteration_grid) {
            row.qber_iters.push_back(rep.per_iteration_qber.at(it - 1));
        }
    }
    return row;
}

std::string render_csv(const ExperimentConfig &cfg, SweepMode mode,
                       const std::vector<ResultRow> &rows) {
    std::string out;
    if (mode == SweepMode::Standard) {
        out += "# qkdrec sweep schema v1\n";
        out +=
            "p,s,codec,block_n,iterations,interleaver,trial,seed,qber_pre,qber_post,"
            "leakage_bits,secret_bound_pre,secret_bound_post,claimed_success,wall_ms\n";
    } else {
        out += "# qkdrec sweep-iterations schema v1\n";
        out += "p,s,codec,block_n,interleaver,trial,seed,qber_pre,leakage_bits,claimed_success";
        for (size_t it : cfg.iteration_grid) {
            out += ",qber_it" + std::to_string(it);
        }
        out += "\n";
    }
    for (const auto &r : rows) {
        out += format_double(r.p);
        out += ',';
        out += format_double(r.s);
        out += ',';
        out += r.codec;
        out += ',';
        out += std::to_string(r.block_n);
        out += ',';
        if (mode == SweepMode::Standard) {
            out += std::to_string(r.iterations);
            out += ',';
        }
        out += r.interleaver;
        out += ',';
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += format_double(r.qber_pre);
        out += ',';
        if (mode == SweepMode::Standard) {
            out += format_double(r.qber_post);
            out += ',';
        }
        out += std::to_string(r.leakage_bits);
        if (mode == SweepMode::Standard) {
            out += ',';
            out += format_double(r.secret_bound_pre);
            out += ',';
            out += format_double(r.secret_bound_post);
        }
        out += ',';
        out += r.claimed_success ? '1' : '0';
        if (mode == SweepMode::Standard) {
            out += ',';
            out += format_double(r.wall_ms);
        } else {
            for (double q : r.qber_iters) {
                out += ',';
                out += format_double(q);
            }
        }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::string &path, const std::string &bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create output directory: " + target.parent_path().string());
        }
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " + path);
    }
}

std::string render_summary(const ExperimentConfig &cfg, SweepMode mode,
                           const std::vector<GridPoint> &points,
                           const std::vector<std::string> &advisories,
                           const std::vector<ResultRow> &rows) {
    std::ostringstream os;
    const size_t per_point = cfg.trials;
    for (const auto &pt : points) {
        const size_t base = pt.point_index * per_point;
        double sum_pre = 0.0;
        double sum_post = 0.0;
        double sum_post_sq = 0.0;
        for (size_t t = 0; t < per_point; ++t) {
            const auto &r = rows[base + t];
            sum_pre += r.qber_pre;
            const double q = mode == SweepMode::Standard
                                 ? r.qber_post
                                 : (r.qber_iters.empty() ? 0.0 : r.qber_iters.back());
            sum_post += q;
            sum_post_sq += q * q;
        }
        const double nt = static_cast<double>(per_point);
        const double mean_pre = sum_pre / nt;
        const double mean_post = sum_post / nt;
        const double var = std::max(0.0, sum_post_sq / nt - mean_post * mean_post);
        const double half = per_point > 1 ? 1.96 * std::sqrt(var / nt) : 0.0;
        os << "p=" << format_double(pt.p) << " s=" << format_double(pt.s) << " codec="
           << cfg.codecs[pt.codec_idx] << " interleaver="
           << to_string(cfg.interleavers[pt.interleaver_idx])
           << " qber_pre=" << format_double(mean_pre) << " qber_post=" << format_double(mean_post)
           << " +-" << format_double(half) << advisories[pt.point_index] << "\n";
    }
    return os.str();
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig &config, SweepMode mode) {
    config.validate();

    // Codecs are built once, before the parallel section, keyed by
    // (preset, interleaver kind); construction draws only on the master seed.
    std::map<std::pair<size_t, size_t>, std::unique_ptr<Codec>> codec_cache;
    for (size_t ci = 0; ci < config.codecs.size(); ++ci) {
        for (size_t ii = 0; ii < config.interleavers.size(); ++ii) {
            codec_cache[{ci, ii}] =
                make_codec(config.codecs[ci], config.master_seed, config.interleavers[ii]);
        }
    }

    std::vector<GridPoint> points;
    for (double p : config.p_grid) {
        for (double s : config.s_grid) {
            for (size_t ci = 0; ci < config.codecs.size(); ++ci) {
                for (size_t ii = 0; ii < config.interleavers.size(); ++ii) {
                    points.push_back({p, s, ci, ii, points.size()});
                }
            }
        }
    }

    std::vector<std::string> advisories(points.size());
    for (const auto &pt : points) {
        const Codec &codec = *codec_cache[{pt.codec_idx, pt.interleaver_idx}];
        const double prior =
            std::clamp(analytic_sifted_qber(pt.p, pt.s), kPriorFloor, kPriorCeil);
        const RateAdvisory adv = rate_check(codec, prior);
        if (adv.verdict != RateVerdict::Feasible) {
            advisories[pt.point_index] =
                std::string(" [rate_check: ") + to_string(adv.verdict) + "]";
        }
    }

    const size_t n_tasks = points.size() * config.trials;
    std::vector<ResultRow> rows(n_tasks);
    std::atomic<size_t> next_task{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const size_t task = next_task.fetch_add(1);
            if (task >= n_tasks || failed.load()) {
                break;
            }
            const GridPoint &pt = points[task / config.trials];
            const size_t trial = task % config.trials;
            try {
                rows[task] = run_trial(config, mode, pt,
                                       *codec_cache[{pt.codec_idx, pt.interleaver_idx}], trial);
            } catch (const std::exception &e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) {
                    first_error = e.what();
                }
            }
        }
    };

    const size_t n_workers = std::max<size_t>(1, std::min(config.workers, n_tasks));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (size_t i = 0; i < n_workers; ++i) {
            threads.emplace_back(worker);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    if (failed.load()) {
        throw std::runtime_error("sweep trial failed: " + first_error);
    }

    SweepResult result;
    result.rows = std::move(rows);
    result.csv = render_csv(config, mode, result.rows);
    result.summary = render_summary(config, mode, points, advisories, result.rows);
    if (!config.output_path.empty()) {
        write_atomic(config.output_path, result.csv);
    }
    return result;
}

Figure figure_from_string(const std::string &name) {
    if (name == "fig4") {
        return Figure::Fig4;
    }
    if (name == "fig5") {
        return Figure::Fig5;
    }
    if (name == "fig6") {
        return Figure::Fig6;
    }
    if (name == "fig7") {
        return Figure::Fig7;
    }
    throw ConfigError("unknown figure (expected fig4..fig7): " + name);
}

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    size_t column(const std::string &name) const {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        throw ConfigError("plotdata: CSV schema mismatch, missing column: " + name);
    }
};

CsvTable read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CSV: " + path);
    }
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto fields = split(line, ',');
        if (table.columns.empty()) {
            table.columns = std::move(fields);
        } else {
            if (fields.size() != table.columns.size()) {
                throw ConfigError("plotdata: ragged CSV row");
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.columns.empty() || table.rows.empty()) {
        throw ConfigError("plotdata: CSV has no data rows");
    }
    return table;
}

struct SeriesAccum {
    std::map<double, std::pair<double, size_t>> by_x;  // x -> (sum, count)
    void add(double x, double y) {
        auto &slot = by_x[x];
        slot.first += y;
        slot.second += 1;
    }
};

std::string series_path(const std::string &out_dir, const std::string &name) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    return (fs::path(out_dir) / name).string();
}

void write_series(const std::string &path, const std::string &header, const SeriesAccum &acc) {
    std::string bytes = header;
    for (const auto &[x, sumcnt] : acc.by_x) {
        bytes += format_double(x);
        bytes += ' ';
        bytes += format_double(sumcnt.first / static_cast<double>(sumcnt.second));
        bytes += '\n';
    }
    write_atomic(path, bytes);
}

}  // namespace

std::vector<std::string> emit_plotdata(const std::string &csv_path, Figure figure,
                                       const std::string &out_dir) {
    const CsvTable table = read_csv(csv_path);
    std::vector<std::string> written;

    const size_t c_p = table.column("p");
    const size_t c_s = table.column("s");
    const size_t c_codec = table.column("codec");

    if (figure == Figure::Fig4 || figure == Figure::Fig6) {
        // QBER vs p; one series per (codec, s) for fig4, per (codec,
        // interleaver) for fig6.
        const size_t c_post = table.column("qber_post");
        const size_t c_il = table.column("interleaver");
        std::map<std::string, SeriesAccum> series;
        std::map<std::string, std::string> headers;
        for (const auto &row : table.rows) {
            std::string key;
            std::string header;
            if (figure == Figure::Fig4) {
                key = "fig4_" + row[c_codec] + "_s" + row[c_s] + ".dat";
                header = "# fig4 codec=" + row[c_codec] + " s=" + row[c_s] +
                         "\n# columns: p mean_qber_post\n";
            } else {
                key = "fig6_" + row[c_codec] + "_" + row[c_il] + ".dat";
                header = "# fig6 codec=" + row[c_codec] + " interleaver=" + row[c_il] +
                         "\n# columns: p mean_qber_post\n";
            }
            series[key].add(parse_double(row[c_p]), parse_double(row[c_post]));
            headers[key] = header;
        }
        for (const auto &[name, acc] : series) {
            const std::string path = series_path(out_dir, name);
            write_series(path, headers[name], acc);
            written.push_back(path);
        }
        return written;
    }

    if (figure == Figure::Fig5) {
        // QBER vs p, one series per (codec, iteration count).
        std::vector<std::pair<size_t, std::string>> iter_cols;
        for (size_t i = 0; i < table.columns.size(); ++i) {
            if (table.columns[i].rfind("qber_it", 0) == 0) {
                iter_cols.emplace_back(i, table.columns[i].substr(7));
            }
        }
        if (iter_cols.empty()) {
            throw ConfigError(
                "plotdata: fig5 needs a sweep-iterations CSV (qber_it* columns missing)");
        }
        std::map<std::string, SeriesAccum> series;
        std::map<std::string, std::string> headers;
        for (const auto &row : table.rows) {
            for (const auto &[col, itname] : iter_cols) {
                const std::string key = "fig5_" + row[c_codec] + "_it" + itname + ".dat";
                series[key].add(parse_double(row[c_p]), parse_double(row[col]));
                headers[key] = "# fig5 codec=" + row[c_codec] + " iterations=" + itname +
                               "\n# columns: p mean_qber_post\n";
            }
        }
        for (const auto &[name, acc] : series) {
            const std::string path = series_path(out_dir, name);
            write_series(path, headers[name], acc);
            written.push_back(path);
        }
        return written;
    }

    // Fig7: secret information vs s, one series per (codec, p), in both the
    // analytic-delta and measured-delta variants.
    const size_t c_post = table.column("qber_post");
    std::map<std::string, SeriesAccum> measured;
    std::map<std::string, SeriesAccum> analytic;
    for (const auto &row : table.rows) {
        const double p = parse_double(row[c_p]);
        const double s = parse_double(row[c_s]);
        const std::string base = row[c_codec] + "_p" + row[c_p];
        measured["fig7_" + base + "_measured.dat"].add(s,
                                                       secret_info_bound(std::min(
                                                           1.0, parse_double(row[c_post]))));
        analytic["fig7_" + base + "_analytic.dat"].add(
            s, secret_info_bound(analytic_sifted_qber(p, s)));
    }
    for (auto *group : {&measured, &analytic}) {
        for (const auto &[name, acc] : *group) {
            const std::string path = series_path(out_dir, name);
            const bool is_analytic = name.find("_analytic") != std::string::npos;
            write_series(path,
                         std::string("# fig7 ") + (is_analytic ? "delta=analytic pre-reconciliation"
                                                               : "delta=measured post-reconciliation") +
                             "\n# columns: s secret_info_bound\n",
                         acc);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace qkdrec
