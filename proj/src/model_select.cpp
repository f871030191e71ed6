#include "coresp/model_select.hpp"

#include "coresp/error.hpp"
#include "coresp/parallel.hpp"
#include "coresp/random.hpp"
#include "coresp/split.hpp"
#include "coresp/stats.hpp"
#include "coresp/table.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace coresp {

double aic_for_group(const GroupChromosome& x, const Eigen::MatrixXd& m, const Eigen::VectorXd& y, AicForm form) {
    if (x.size() != static_cast<std::size_t>(m.cols())) throw ValidationError("chromosome length does not match taxa");
    if (y.size() != m.rows()) throw ValidationError("functional variable length does not match samples");
    const std::size_t k = x.count();
    if (k == 0) throw ValidationError("AIC of an empty group");

    const Eigen::VectorXd s0 = center(Eigen::VectorXd(m * x.as_vector()));
    const Eigen::VectorXd y0 = center(y);
    const double sxx = s0.squaredNorm();
    if (sxx <= degenerate_variance) throw NumericError("AIC: co-response effect has zero variance");

    const auto n = static_cast<double>(y.size());
    const double slope = s0.dot(y0) / sxx;
    double rss = (y0 - slope * s0).squaredNorm();
    rss = std::max(rss, 1e-12 * n * (y0.squaredNorm() / n));
    if (!(rss > 0.0)) throw NumericError("AIC: functional variable has zero variance");

    const double log_likelihood = -(n / 2.0) * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
    const auto kk = static_cast<double>(k);
    return form == AicForm::standard ? 2.0 * kk - 2.0 * log_likelihood : -2.0 * kk - log_likelihood;
}

ModelSelectionResult sweep_k(const Eigen::MatrixXd& m, const Eigen::VectorXd& y, const OptimizerConfig& base,
                             const SweepOptions& options) {
    if (options.k_min < 1 || options.k_max < options.k_min) throw ValidationError("invalid k range");
    if (options.repeats < 1) throw ValidationError("repeats must be positive");

    const Eigen::MatrixXd m0 = center_columns(m);
    const Eigen::VectorXd y0 = center(y);

    ModelSelectionResult result;
    for (int k = options.k_min; k <= options.k_max; ++k) {
        for (int rep = 0; rep < options.repeats; ++rep) result.runs.push_back({k, rep, 0.0, 0.0, {}});
    }
    parallel_for(result.runs.size(), options.threads, [&](std::size_t i) {
        auto& run = result.runs[i];
        OptimizerConfig cfg = base;
        cfg.mode = PenaltyMode::size_cap;
        cfg.k_opt = run.k;
        cfg.threads = 1;
        cfg.seed = derive_seed(base.seed, {static_cast<std::uint64_t>(run.k), static_cast<std::uint64_t>(run.repeat)});
        const GaResult ga = run_ga(m0, y0, cfg);
        run.group = ga.best;
        run.r = ga.best_eval.pearson_r;
        run.aic = aic_for_group(ga.best, m, y, options.form);
    });

    double best = 0.0;
    for (int k = options.k_min; k <= options.k_max; ++k) {
        KSweepSummary summary;
        summary.k = k;
        for (const auto& run : result.runs) {
            if (run.k == k) summary.aic.push_back(run.aic);
        }
        summary.mean_aic = mean(summary.aic);
        if (result.per_k.empty() || summary.mean_aic < best) {
            best = summary.mean_aic;
            result.chosen_k = k;
        }
        result.per_k.push_back(std::move(summary));
    }
    return result;
}

std::vector<double> default_mu_grid() {
    std::vector<double> grid;
    for (int d = 30; d <= 100; d += 10) grid.push_back(1.0 / d);
    return grid;
}

ModelSelectionResult tune_mu(const Eigen::MatrixXd& m_train, const Eigen::VectorXd& y_train,
                             const std::vector<double>& grid, const OptimizerConfig& base,
                             const MuTuningOptions& options) {
    if (grid.empty()) throw ValidationError("mu grid is empty");
    if (options.inner_repeats < 1) throw ValidationError("inner repeats must be positive");
    for (double mu : grid) {
        if (!(mu >= 0.0)) throw ValidationError("mu grid values must be non-negative");
    }

    constexpr std::uint64_t tuning_tag = 0x6d75;
    const std::size_t reps = static_cast<std::size_t>(options.inner_repeats);
    struct Job {
        std::size_t rep;
        std::size_t g;
        double r;
        std::size_t size;
    };

    std::vector<SplitPlan> plans;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        plans.push_back(stratified_split(y_train, options.fraction, options.n_strata,
                                         derive_seed(base.seed, {tuning_tag, rep, 0})));
    }
    std::vector<Job> jobs;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        for (std::size_t g = 0; g < grid.size(); ++g) jobs.push_back({rep, g, 0.0, 0});
    }
    parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
        auto& job = jobs[i];
        const auto& plan = plans[job.rep];
        const Eigen::MatrixXd m_in = select_rows(m_train, plan.train_indices);
        const Eigen::VectorXd y_in = select_rows(y_train, plan.train_indices);
        OptimizerConfig cfg = base;
        cfg.mode = PenaltyMode::l1;
        cfg.mu = grid[job.g];
        cfg.threads = 1;
        cfg.seed = derive_seed(base.seed, {tuning_tag, job.rep, 1});
        const GaResult ga = run_ga(center_columns(m_in), center(y_in), cfg);
        const Eigen::VectorXd s_val = select_rows(m_train, plan.test_indices) * ga.best.as_vector();
        job.r = pearson(s_val, select_rows(y_train, plan.test_indices));
        job.size = ga.best.count();
    });

    ModelSelectionResult result;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        MuScore score;
        score.mu = grid[g];
        double size_sum = 0.0;
        for (const auto& job : jobs) {
            if (job.g != g) continue;
            score.validation_r.push_back(job.r);
            size_sum += static_cast<double>(job.size);
        }
        score.mean_validation_r = mean(score.validation_r);
        score.mean_group_size = size_sum / static_cast<double>(reps);
        result.per_mu.push_back(std::move(score));
    }
    const MuScore* chosen = nullptr;
    for (const auto& score : result.per_mu) {
        if (!chosen || score.mean_validation_r > chosen->mean_validation_r ||
            (score.mean_validation_r == chosen->mean_validation_r && score.mu > chosen->mu)) {
            chosen = &score;
        }
    }
    result.chosen_mu = chosen->mu;
    return result;
}

void write_sweep(const std::filesystem::path& path, const ModelSelectionResult& result, int significant_digits) {
    TextTable table;
    table.header = {"k", "repeat", "aic", "r", "group_bits"};
    for (const auto& run : result.runs) {
        table.rows.push_back({std::to_string(run.k), std::to_string(run.repeat),
                              format_number(run.aic, significant_digits), format_number(run.r, significant_digits),
                              run.group.to_string()});
    }
    write_table(path, table);
}

} // namespace coresp
