#include "qkdrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdrec {

double qber(const BitVec &a, const BitVec &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("qber: length mismatch");
    }
    if (a.size() == 0) {
        throw std::invalid_argument("qber: empty strings");
    }
    return static_cast<double>(a.hamming_distance(b)) / static_cast<double>(a.size());
}

double binary_entropy(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("binary_entropy: delta outside [0, 1]");
    }
    double h = 0.0;
    if (delta > 0.0) {
        h -= delta * std::log2(delta);
    }
    if (delta < 1.0) {
        h -= (1.0 - delta) * std::log2(1.0 - delta);
    }
    return h;
}

double secret_info_bound(double delta) { return 1.0 - binary_entropy(delta); }

double efficiency(uint64_t leakage_bits, size_t n, double qber_before) {
    if (n == 0) {
        throw std::invalid_argument("efficiency: n must be >= 1");
    }
    if (!(qber_before > 0.0 && qber_before < 0.5)) {
        throw std::invalid_argument("efficiency: qber_before must be in (0, 0.5)");
    }
    return static_cast<double>(leakage_bits) /
           (static_cast<double>(n) * binary_entropy(qber_before));
}

std::pair<double, double> fit_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const size_t n = x.size();
    if (n != y.size() || n < 3) {
        throw std::invalid_argument("fit_slope: need >= 3 paired points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    const double a = my - b * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (a + b * x[i]);
        ss_res += r * r;
    }
    const double dof = static_cast<double>(n - 2);
    const double se = dof > 0.0 ? std::sqrt(ss_res / dof / sxx) : 0.0;
    return {b, se};
}

ScalingFit complexity_probe(const std::function<double(size_t)> &time_one,
                            const std::vector<size_t> &sizes, size_t trials) {
    if (sizes.size() < 3) {
        throw std::invalid_argument("complexity_probe: need >= 3 sizes");
    }
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    if (static_cast<double>(*mx) < 100.0 * static_cast<double>(*mn)) {
        throw std::invalid_argument("complexity_probe: sizes must span >= 2 decades");
    }
    if (trials == 0) {
        throw std::invalid_argument("complexity_probe: trials must be >= 1");
    }

    ScalingFit fit;
    std::vector<double> lx;
    std::vector<double> ly;
    for (size_t n : sizes) {
        std::vector<double> samples;
        samples.reserve(trials);
        for (size_t t = 0; t < trials; ++t) {
            samples.push_back(time_one(n));
        }
        std::sort(samples.begin(), samples.end());
        const double median = samples[samples.size() / 2];
        fit.points.push_back({n, median});
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(median));
    }
    const auto [slope, se] = fit_slope(lx, ly);
    fit.exponent = slope;
    fit.std_error = se;
    return fit;
}

}  // namespace qkdrec
