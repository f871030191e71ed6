#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "coresp/network.hpp"

namespace coresp {

struct ClusterResult {
    std::vector<int> assignment;  ///< contiguous ids 0..n_clusters-1, numbered by first node
    double modularity_q = 0.0;
    int n_clusters = 0;
};

/// Weighted modularity (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j).
/// Zero for a graph without edges.
double modularity(const Eigen::MatrixXd& adjacency, const std::vector<int>& assignment, double resolution = 1.0);

/// One Louvain run (local moving + aggregation until no move improves Q);
/// node visiting order is shuffled with `seed`.
ClusterResult louvain(const CoOccurrenceNetwork& net, double resolution = 1.0, std::uint64_t seed = 0);

/// Best-Q partition over `n_seeds` Louvain runs with seeds derived from
/// `master_seed`; the earliest seed wins ties.
ClusterResult louvain_best(const CoOccurrenceNetwork& net, double resolution = 1.0, int n_seeds = 10,
                           std::uint64_t master_seed = 0);

/// All-pairs shortest path lengths with edge length 1 / weight (Dijkstra from
/// every node); unreachable pairs are +infinity.
Eigen::MatrixXd shortest_path_lengths(const CoOccurrenceNetwork& net);

struct CentralityReport {
    Eigen::VectorXd degree;     ///< sum of incident weights
    Eigen::VectorXd closeness;  ///< harmonic: mean over other nodes of 1 / d(i, j)
};

CentralityReport centralities(const CoOccurrenceNetwork& net);

struct GroupLocation {
    std::vector<std::size_t> top;
    int cluster_spread = 0;          ///< distinct clusters among the top taxa
    int connected_to_top = 0;        ///< top taxa adjacent to at least one other top taxon
    int common_neighbors = 0;        ///< non-top nodes adjacent to at least two top taxa
    std::vector<int> degree_rank;    ///< 1-based rank of each top taxon, highest degree first
    std::vector<int> closeness_rank;
};

/// Locates the top_k most important taxa inside the network. An edge counts
/// when its weight is strictly greater than edge_threshold.
GroupLocation locate_group(const CoOccurrenceNetwork& net, const Eigen::VectorXd& importance, std::size_t top_k,
                           const ClusterResult& clusters, const CentralityReport& centrality,
                           double edge_threshold = 0.0);

/// taxon, cluster, degree, closeness
void write_node_metrics(const std::filesystem::path& path, const CoOccurrenceNetwork& net,
                        const ClusterResult& clusters, const CentralityReport& centrality, int significant_digits);

} // namespace coresp
