#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coresp {

/// Train/test partition of sample indices, stratified on the functional variable.
struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    /// Stratum id for every sample (equal-frequency bins of y, 0 = lowest).
    std::vector<int> stratum_of;
    double fraction = 0.5;
    int n_strata = 10;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// Equal-frequency binning of y into n_strata bins (ties ordered by sample
/// index), then a seeded shuffle inside each bin. A bin of size m sends
/// floor(fraction * m) samples to train, plus one more on every other bin
/// whose share is fractional, so per-bin counts do not depend on the seed.
/// Bins with fewer than two samples are assigned alternately to train and
/// test with a warning.
SplitPlan stratified_split(const Eigen::VectorXd& y, double fraction = 0.5, int n_strata = 10, std::uint64_t seed = 0);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows);
Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows);

} // namespace coresp
