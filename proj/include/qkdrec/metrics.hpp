#pragma once

#include <functional>
#include <vector>

#include "qkdrec/bits.hpp"

namespace qkdrec {

// Hamming distance over length. Throws on length mismatch or empty input.
double qber(const BitVec &a, const BitVec &b);

// Binary entropy in bits; 0*log2(0) taken as 0 by continuity.
double binary_entropy(double delta);

// Secret-information bound 1 + (1-d)log2(1-d) + d*log2(d) = 1 - h2(d).
double secret_info_bound(double delta);

// leakage / (n * h2(qber_before)); 1.0 is the Slepian-Wolf optimum.
double efficiency(uint64_t leakage_bits, size_t n, double qber_before);

struct ScalingPoint {
    size_t n = 0;
    double median_seconds = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;    // least-squares slope of log(time) vs log(n)
    double std_error = 0.0;   // standard error of the slope
    std::vector<ScalingPoint> points;
};

// Measures `time_one(n)` (seconds for one decode at size n) `trials` times
// per size, keeps the median, and fits log-time against log-n. Sizes must
// contain at least 3 entries spanning at least two decades. Intended to run
// on a single worker; wall-clock contention shows up directly in std_error.
ScalingFit complexity_probe(const std::function<double(size_t)> &time_one,
                            const std::vector<size_t> &sizes, size_t trials);

// Least-squares fit y = a + b*x returning (b, std error of b).
std::pair<double, double> fit_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace qkdrec
