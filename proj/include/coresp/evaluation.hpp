#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coresp/ga.hpp"
#include "coresp/ingest.hpp"
#include "coresp/network.hpp"
#include "coresp/split.hpp"

namespace coresp {

/// One method under comparison. With mode == l1 and a non-empty mu_grid the
/// penalty is tuned on every training split; otherwise optimizer.mu is used.
struct MethodSpec {
    std::string tag;
    bool use_graph = true;
    OptimizerConfig optimizer;
    std::vector<double> mu_grid;
    int tuning_repeats = 1;
};

struct EvaluationProtocol {
    int repeats = 100;
    double fraction = 0.5;
    int n_strata = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct EvaluationReport {
    std::string method_tag;
    std::vector<double> per_repeat_test_r;
    std::vector<std::size_t> per_repeat_group_size;
    double mean_r = 0.0;
    double std_r = 0.0;  ///< sample standard deviation
};

/// Repeated stratified train/test evaluation. The convolution operator is built
/// once from the full network and applied to the train and test rows
/// separately; `network` may be null, or the method may set use_graph = false,
/// for the identity operator. Repeat i uses the same split and GA seed for
/// every method, so reports are paired.
EvaluationReport evaluate_method(const AbundanceMatrix& abundance, const CoOccurrenceNetwork* network,
                                 const FunctionalVariable& y, const MethodSpec& method,
                                 const EvaluationProtocol& protocol);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double degrees_of_freedom = 0.0;
    bool significant = false;
};

/// Two-sided paired t-test on a - b; significant when p < alpha.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

/// repeat, method, test_r
void write_report_table(const std::filesystem::path& path, const std::vector<EvaluationReport>& reports,
                        int significant_digits);
/// method, mean, std, n
void write_report_summary(const std::filesystem::path& path, const std::vector<EvaluationReport>& reports,
                          int significant_digits);

} // namespace coresp
