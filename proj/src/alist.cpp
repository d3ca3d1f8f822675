#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "qkdrec/ldpc.hpp"

namespace qkdrec {

// MacKay alist layout: "n m", "max_dv max_dc", per-column degrees,
// per-row degrees, then one adjacency line per column and per row,
// 1-indexed, zero-padded up to the maximum degree.
void write_alist(const ParityCheckMatrix &H, std::ostream &out) {
    std::vector<std::vector<uint32_t>> cols(H.n);
    for (size_t c = 0; c < H.m; ++c) {
        for (uint32_t v : H.rows[c]) {
            cols[v].push_back(static_cast<uint32_t>(c));
        }
    }
    size_t max_dv = 0;
    size_t max_dc = 0;
    for (const auto &col : cols) {
        max_dv = std::max(max_dv, col.size());
    }
    for (const auto &row : H.rows) {
        max_dc = std::max(max_dc, row.size());
    }

    out << H.n << ' ' << H.m << '\n';
    out << max_dv << ' ' << max_dc << '\n';
    for (size_t v = 0; v < H.n; ++v) {
        out << cols[v].size() << (v + 1 < H.n ? ' ' : '\n');
    }
    for (size_t c = 0; c < H.m; ++c) {
        out << H.rows[c].size() << (c + 1 < H.m ? ' ' : '\n');
    }
    for (size_t v = 0; v < H.n; ++v) {
        for (size_t j = 0; j < max_dv; ++j) {
            const uint32_t entry = j < cols[v].size() ? cols[v][j] + 1 : 0;
            out << entry << (j + 1 < max_dv ? ' ' : '\n');
        }
    }
    for (size_t c = 0; c < H.m; ++c) {
        for (size_t j = 0; j < max_dc; ++j) {
            const uint32_t entry = j < H.rows[c].size() ? H.rows[c][j] + 1 : 0;
            out << entry << (j + 1 < max_dc ? ' ' : '\n');
        }
    }
}

ParityCheckMatrix read_alist(std::istream &in) {
    auto next = [&in]() {
        long long v;
        if (!(in >> v)) {
            throw std::runtime_error("alist: truncated file");
        }
        return v;
    };

    const long long n = next();
    const long long m = next();
    if (n <= 0 || m <= 0) {
        throw std::runtime_error("alist: bad dimensions");
    }
    const long long max_dv = next();
    const long long max_dc = next();

    std::vector<long long> col_deg(static_cast<size_t>(n));
    for (auto &d : col_deg) {
        d = next();
        if (d < 0 || d > max_dv) {
            throw std::runtime_error("alist: column degree out of range");
        }
    }
    std::vector<long long> row_deg(static_cast<size_t>(m));
    for (auto &d : row_deg) {
        d = next();
        if (d < 0 || d > max_dc) {
            throw std::runtime_error("alist: row degree out of range");
        }
    }

    ParityCheckMatrix H;
    H.n = static_cast<size_t>(n);
    H.m = static_cast<size_t>(m);
    H.rows.assign(H.m, {});
    for (size_t c = 0; c < H.m; ++c) {
        H.rows[c].reserve(static_cast<size_t>(row_deg[c]));
    }

    // Column adjacency (both sections may carry zero padding).
    for (long long v = 0; v < n; ++v) {
        for (long long j = 0; j < max_dv; ++j) {
            const long long entry = next();
            if (entry == 0) {
                continue;
            }
            if (entry < 1 || entry > m) {
                throw std::runtime_error("alist: check index out of range");
            }
            H.rows[static_cast<size_t>(entry - 1)].push_back(static_cast<uint32_t>(v));
        }
    }
    // Row adjacency: read and cross-check against what the columns declared.
    for (size_t c = 0; c < H.m; ++c) {
        std::vector<uint32_t> row;
        for (long long j = 0; j < max_dc; ++j) {
            const long long entry = next();
            if (entry == 0) {
                continue;
            }
            if (entry < 1 || entry > n) {
                throw std::runtime_error("alist: variable index out of range");
            }
            row.push_back(static_cast<uint32_t>(entry - 1));
        }
        std::sort(row.begin(), row.end());
        std::sort(H.rows[c].begin(), H.rows[c].end());
        if (row != H.rows[c]) {
            throw std::runtime_error("alist: row/column sections disagree");
        }
        if (static_cast<long long>(row.size()) != row_deg[c]) {
            throw std::runtime_error("alist: row degree mismatch");
        }
    }

    // Recover regular metadata when the declared degrees are uniform.
    const bool uniform_cols =
        std::all_of(col_deg.begin(), col_deg.end(), [&](long long d) { return d == col_deg[0]; });
    const bool uniform_rows =
        std::all_of(row_deg.begin(), row_deg.end(), [&](long long d) { return d == row_deg[0]; });
    if (uniform_cols && uniform_rows) {
        H.dv = static_cast<size_t>(col_deg[0]);
        H.dc = static_cast<size_t>(row_deg[0]);
    }
    H.four_cycles = count_four_cycles(H);
    return H;
}

void write_alist_file(const ParityCheckMatrix &H, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("alist: cannot open for writing: " + path);
    }
    write_alist(H, out);
    if (!out.flush()) {
        throw std::runtime_error("alist: write failed: " + path);
    }
}

ParityCheckMatrix read_alist_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("alist: cannot open: " + path);
    }
    return read_alist(in);
}

}  // namespace qkdrec
