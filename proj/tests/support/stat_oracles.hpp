#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tbd::testing {

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

inline MeanEstimate sample_mean(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

// One-sample Kolmogorov-Smirnov statistic against Exp(mean).
inline double ks_statistic_exponential(std::vector<double> xs, double mean) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = 1.0 - std::exp(-xs[i] / mean);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

// Asymptotic p-value with the Stephens small-sample correction:
// Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2), t = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
inline double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double t = (sn + 0.12 + 0.11 / sn) * d;
    if (t < 1e-3) return 1.0;
    double q = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        q += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

} // namespace tbd::testing
