#include "coresp/evaluation.hpp"

#include "coresp/error.hpp"
#include "coresp/model_select.hpp"
#include "coresp/parallel.hpp"
#include "coresp/random.hpp"
#include "coresp/stats.hpp"
#include "coresp/table.hpp"

#include <cmath>

#include <fmt/format.h>

namespace coresp {

namespace {

constexpr std::uint64_t split_tag = 0x73706c6974;
constexpr std::uint64_t ga_tag = 0x6761;

} // namespace

EvaluationReport evaluate_method(const AbundanceMatrix& abundance, const CoOccurrenceNetwork* network,
                                 const FunctionalVariable& y, const MethodSpec& method,
                                 const EvaluationProtocol& protocol) {
    if (protocol.repeats < 1) throw ValidationError("evaluation repeats must be positive");
    if (y.size() != abundance.n_samples()) throw ValidationError("functional variable does not match samples");
    const Eigen::Index p = abundance.values.cols();

    Eigen::MatrixXd op = Eigen::MatrixXd::Identity(p, p);
    if (method.use_graph && network) {
        if (network->size() != abundance.n_taxa()) throw ValidationError("network does not match abundance taxa");
        op = convolution_operator(network->adjacency);
    }
    const bool tune = method.optimizer.mode == PenaltyMode::l1 && !method.mu_grid.empty();

    EvaluationReport report;
    report.method_tag = method.tag;
    const auto repeats = static_cast<std::size_t>(protocol.repeats);
    report.per_repeat_test_r.assign(repeats, 0.0);
    report.per_repeat_group_size.assign(repeats, 0);

    parallel_for(repeats, protocol.threads, [&](std::size_t rep) {
        const SplitPlan plan = stratified_split(y.values, protocol.fraction, protocol.n_strata,
                                                derive_seed(protocol.seed, {split_tag, rep}));
        const TopologicalAbundance train = convolve_rows(select_rows(abundance.values, plan.train_indices), op);
        const Eigen::MatrixXd test_m = select_rows(abundance.values, plan.test_indices) * op;
        const Eigen::VectorXd y_train = select_rows(y.values, plan.train_indices);
        const Eigen::VectorXd y_test = select_rows(y.values, plan.test_indices);

        OptimizerConfig cfg = method.optimizer;
        cfg.threads = 1;
        cfg.seed = derive_seed(protocol.seed, {ga_tag, rep});
        if (tune) {
            MuTuningOptions inner;
            inner.inner_repeats = method.tuning_repeats;
            inner.fraction = protocol.fraction;
            inner.n_strata = protocol.n_strata;
            cfg.mu = tune_mu(train.values, y_train, method.mu_grid, cfg, inner).chosen_mu;
        }
        const GaResult ga = run_ga(train.centered, center(y_train), cfg);
        report.per_repeat_test_r[rep] = pearson(test_m * ga.best.as_vector(), y_test);
        report.per_repeat_group_size[rep] = ga.best.count();
    });

    report.mean_r = mean(report.per_repeat_test_r);
    report.std_r = sample_sd(report.per_repeat_test_r);
    return report;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.size() != b.size()) throw ValidationError("paired t-test needs equal-length samples");
    if (a.size() < 2) throw ValidationError("paired t-test needs at least two pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double sd = sample_sd(d);
    if (!(sd > 0.0)) throw NumericError("paired t-test: differences have zero variance");

    TTestResult out;
    const auto n = static_cast<double>(d.size());
    out.degrees_of_freedom = n - 1.0;
    out.t = mean(d) / (sd / std::sqrt(n));
    out.p = student_t_two_sided_p(out.t, out.degrees_of_freedom);
    out.significant = out.p < alpha;
    return out;
}

void write_report_table(const std::filesystem::path& path, const std::vector<EvaluationReport>& reports,
                        int significant_digits) {
    TextTable table;
    table.header = {"repeat", "method", "test_r"};
    for (const auto& report : reports) {
        for (std::size_t i = 0; i < report.per_repeat_test_r.size(); ++i) {
            table.rows.push_back({std::to_string(i), report.method_tag,
                                  format_number(report.per_repeat_test_r[i], significant_digits)});
        }
    }
    write_table(path, table);
}

void write_report_summary(const std::filesystem::path& path, const std::vector<EvaluationReport>& reports,
                          int significant_digits) {
    TextTable table;
    table.header = {"method", "mean", "std", "n"};
    for (const auto& report : reports) {
        table.rows.push_back({report.method_tag, format_number(report.mean_r, significant_digits),
                              format_number(report.std_r, significant_digits),
                              std::to_string(report.per_repeat_test_r.size())});
    }
    write_table(path, table);
}

} // namespace coresp
