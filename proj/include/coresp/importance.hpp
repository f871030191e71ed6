#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coresp/ga.hpp"
#include "coresp/ingest.hpp"
#include "coresp/network.hpp"

namespace coresp {

struct RunOutcome {
    GroupChromosome group;
    double r = 0.0;
};

struct ImportanceResult {
    Eigen::VectorXd taxon_importance;  ///< mean over runs of r * x
    Eigen::MatrixXd pair_importance;   ///< mean over runs of r * x x^T
    std::size_t runs = 0;
    std::vector<RunOutcome> per_run;
};

/// Exact elementwise means; the diagonal of pair_importance is computed by the
/// same summation as taxon_importance, so L_ii == I_i bit for bit.
ImportanceResult aggregate_importance(std::span<const RunOutcome> runs);

/// Indices of the top_k taxa by importance, descending; ties go to the lower index.
std::vector<std::size_t> top_taxa(const Eigen::VectorXd& importance, std::size_t top_k);

struct DiscoveryConfig {
    OptimizerConfig optimizer;
    int runs = 10;
    /// Non-empty with l1 mode: mu is tuned once on the full data before the runs.
    std::vector<double> mu_grid;
    int tuning_repeats = 1;
    /// Number of highest-importance taxa in the post-hoc check; 0 means k_opt.
    std::size_t top_k = 0;
    int threads = 1;
};

struct DiscoveryResult {
    ImportanceResult importance;
    double mu_used = 0.0;
    std::vector<std::size_t> top;
    double top_r = 0.0;  ///< Pearson r between the top taxa's co-response effect and y
    double top_p = 1.0;
    Eigen::VectorXd mean_abundance;  ///< column means of the input abundance
};

/// Runs the GA on the whole dataset `runs` times with seeds derived from the
/// optimizer seed and aggregates the best groups. `network` may be null for
/// the identity operator.
DiscoveryResult discover_importance(const AbundanceMatrix& abundance, const CoOccurrenceNetwork* network,
                                    const FunctionalVariable& y, const DiscoveryConfig& cfg);

/// Node table: taxon, importance, mean_abundance, top (0/1).
void write_importance_nodes(const std::filesystem::path& path, const DiscoveryResult& result,
                            const std::vector<std::string>& labels, int significant_digits);
/// Edge table: taxon_a, taxon_b, weight for every i < j with L_ij != 0.
void write_importance_edges(const std::filesystem::path& path, const ImportanceResult& result,
                            const std::vector<std::string>& labels, int significant_digits);
/// GraphML of taxa with non-zero importance; edges with |L_ij| < threshold are left out.
void write_importance_graphml(const std::filesystem::path& path, const DiscoveryResult& result,
                              const std::vector<std::string>& labels, double threshold);
/// run, r, group_bits
void write_runs(const std::filesystem::path& path, const ImportanceResult& result, int significant_digits);

struct ImportanceTable {
    std::vector<std::string> labels;
    Eigen::VectorXd importance;
};

/// Reads the node table written by write_importance_nodes.
ImportanceTable read_importance_nodes(const std::filesystem::path& path);

} // namespace coresp
