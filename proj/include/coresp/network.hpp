#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coresp/ingest.hpp"

namespace coresp {

/// Undirected weighted co-occurrence graph over taxa.
struct CoOccurrenceNetwork {
    Eigen::MatrixXd adjacency;
    std::vector<std::string> taxon_labels;

    std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }

    /// Square, symmetric within 1e-12, zero diagonal, finite non-negative weights.
    void validate() const;

    static CoOccurrenceNetwork empty_graph(std::vector<std::string> labels);
};

struct AdjacencyLoad {
    CoOccurrenceNetwork network;
    std::vector<std::string> warnings;
};

/// Loads either a labeled square matrix or a (source, target, weight) edge
/// list, reordered to `labels`. Asymmetric matrices are averaged with their
/// transpose and a nonzero diagonal is cleared; both produce warnings.
AdjacencyLoad load_adjacency(const std::filesystem::path& path, const std::vector<std::string>& labels);

void write_adjacency(const std::filesystem::path& path, const CoOccurrenceNetwork& net, int significant_digits = 0);

/// Writes (source, target, weight) for i < j with weight > threshold.
void write_edge_list(const std::filesystem::path& path, const CoOccurrenceNetwork& net, double threshold,
                     int significant_digits = 0);

struct NetworkInferenceConfig {
    double mu1 = 0.1;   ///< l1 penalty
    double mu2 = 0.01;  ///< squared-norm penalty
    int max_iterations = 1000;
    double tolerance = 1e-7;
    int threads = 1;
};

/// Elastic-net multi-regression network. Each taxon column is standardized and
/// regressed on all others with non-negative coefficients by coordinate
/// descent on
///     (1/2n) ||x_j - X_{-j} b||^2 + mu1 ||b||_1 + (mu2/2) ||b||^2,
/// and the coefficient matrix B (zero diagonal) is returned as (B + B^T)/2.
CoOccurrenceNetwork infer_network(const AbundanceMatrix& m, const NetworkInferenceConfig& cfg = {});

/// D^{-1/2} (A + I) D^{-1/2}, D the diagonal of row sums of A + I.
Eigen::MatrixXd convolution_operator(const Eigen::MatrixXd& adjacency);

/// Convolved abundance M and its column-centered form M0.
struct TopologicalAbundance {
    Eigen::MatrixXd values;
    Eigen::MatrixXd centered;
};

TopologicalAbundance convolve(const AbundanceMatrix& m, const CoOccurrenceNetwork& net);

/// Applies a prebuilt operator to a block of abundance rows.
TopologicalAbundance convolve_rows(const Eigen::MatrixXd& abundance, const Eigen::MatrixXd& op);

} // namespace coresp
