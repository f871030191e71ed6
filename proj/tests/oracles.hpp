#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "coresp/ga.hpp"

namespace oracle {

/// M = H D^{-1/2} (A + I) D^{-1/2} by explicit loops.
inline Eigen::MatrixXd naive_convolve(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a) {
    const auto n = h.rows();
    const auto p = h.cols();
    std::vector<double> degree(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) degree[i] += a(i, j) + (i == j ? 1.0 : 0.0);
    }
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < p; ++k) {
                const double aug = a(k, c) + (k == c ? 1.0 : 0.0);
                acc += h(r, k) * aug / std::sqrt(degree[k] * degree[c]);
            }
            m(r, c) = acc;
        }
    }
    return m;
}

/// Textbook Pearson correlation: covariance over product of standard deviations.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    cov /= n - 1;
    return cov / (std::sqrt(va / (n - 1)) * std::sqrt(vb / (n - 1)));
}

/// Group effect s = sum of selected columns, computed row by row.
inline std::vector<double> group_effect(const Eigen::MatrixXd& m, const coresp::GroupChromosome& x) {
    std::vector<double> s(static_cast<std::size_t>(m.rows()), 0.0);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            if (x.test(c)) s[static_cast<std::size_t>(r)] += m(r, static_cast<Eigen::Index>(c));
        }
    }
    return s;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Raw objective from its definition: sum_i s0_i y0_i / sqrt(sum_i s0_i^2), with
/// s0 and y0 mean-centered here.
inline double raw_objective(const Eigen::MatrixXd& m, const Eigen::VectorXd& y, const coresp::GroupChromosome& x) {
    auto s = group_effect(m, x);
    const double n = static_cast<double>(s.size());
    double ms = 0.0, my = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        ms += s[i];
        my += y[static_cast<Eigen::Index>(i)];
    }
    ms /= n;
    my /= n;
    double num = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        num += (s[i] - ms) * (y[static_cast<Eigen::Index>(i)] - my);
        ss += (s[i] - ms) * (s[i] - ms);
    }
    return num / std::sqrt(ss);
}

/// Best size-capped fitness over every non-empty group of size <= k_max.
inline double brute_force_best(const Eigen::MatrixXd& m, const Eigen::VectorXd& y, std::size_t k_max) {
    const auto p = static_cast<std::size_t>(m.cols());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask < (std::size_t{1} << p); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) > k_max) continue;
        coresp::GroupChromosome x(p);
        for (std::size_t j = 0; j < p; ++j) x.set(j, (mask >> j) & 1U);
        best = std::max(best, raw_objective(m, y, x));
    }
    return best;
}

/// Two-sided Student t p-value by composite Simpson integration of the density.
inline double t_two_sided_p(double t, double df, int intervals = 20000) {
    const double norm = std::tgamma((df + 1) / 2) / (std::sqrt(df * M_PI) * std::tgamma(df / 2));
    auto density = [&](double x) { return norm * std::pow(1 + x * x / df, -(df + 1) / 2); };
    const double b = std::abs(t);
    const double h = b / intervals;
    double sum = density(0) + density(b);
    for (int i = 1; i < intervals; ++i) sum += density(i * h) * (i % 2 ? 4 : 2);
    return 1.0 - 2.0 * sum * h / 3.0;
}

/// Floyd-Warshall over edge lengths 1 / weight.
inline Eigen::MatrixXd floyd_warshall(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && a(i, j) > 0) d(i, j) = 1.0 / a(i, j);
        }
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

inline double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t inter = 0;
    for (auto x : a)
        for (auto y : b) inter += x == y;
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace oracle
