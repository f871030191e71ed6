#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "coresp/ga.hpp"

namespace coresp {

enum class AicForm {
    standard,         ///< 2k - 2 ln L
    negated_penalty,  ///< -2k - ln L, kept for comparison with older results
};

/// AIC of the group's co-response effect s = M x as a predictor of y in the
/// ordinary least-squares fit y = b0 + b1 s. k is the group size. The residual
/// sum of squares is floored at 1e-12 * n * var(y) so a perfect fit stays finite.
double aic_for_group(const GroupChromosome& x, const Eigen::MatrixXd& m, const Eigen::VectorXd& y,
                     AicForm form = AicForm::standard);

struct KSweepRun {
    int k = 0;
    int repeat = 0;
    double aic = 0.0;
    double r = 0.0;
    GroupChromosome group;
};

struct KSweepSummary {
    int k = 0;
    std::vector<double> aic;
    double mean_aic = 0.0;
};

struct MuScore {
    double mu = 0.0;
    std::vector<double> validation_r;
    double mean_validation_r = 0.0;
    double mean_group_size = 0.0;
};

struct ModelSelectionResult {
    std::vector<KSweepRun> runs;
    std::vector<KSweepSummary> per_k;
    int chosen_k = 0;  ///< minimal mean AIC; ties go to the smaller k
    std::vector<MuScore> per_mu;
    double chosen_mu = 0.0;  ///< maximal mean validation r; ties go to the larger mu
};

struct SweepOptions {
    int k_min = 2;
    int k_max = 50;
    int repeats = 10;
    AicForm form = AicForm::standard;
    int threads = 1;
};

/// Runs the size-capped GA `repeats` times for every k in [k_min, k_max] with
/// seeds derived from (base.seed, k, repeat) and scores each best group by AIC.
/// `m` is the (uncentered) topological abundance.
ModelSelectionResult sweep_k(const Eigen::MatrixXd& m, const Eigen::VectorXd& y, const OptimizerConfig& base,
                             const SweepOptions& options = {});

std::vector<double> default_mu_grid();

struct MuTuningOptions {
    int inner_repeats = 1;
    double fraction = 0.5;
    int n_strata = 10;
    int threads = 1;
};

/// Picks mu for the l1-penalized GA: inner stratified split of the training
/// data, one GA per grid value on the inner-train part (same seed for every
/// mu), scored by Pearson r on the inner-validation part.
ModelSelectionResult tune_mu(const Eigen::MatrixXd& m_train, const Eigen::VectorXd& y_train,
                             const std::vector<double>& grid, const OptimizerConfig& base,
                             const MuTuningOptions& options = {});

/// k, repeat, aic, r, group_bits
void write_sweep(const std::filesystem::path& path, const ModelSelectionResult& result, int significant_digits);

} // namespace coresp
