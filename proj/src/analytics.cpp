#include "coresp/analytics.hpp"

#include "coresp/error.hpp"
#include "coresp/importance.hpp"
#include "coresp/random.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace coresp {

double modularity(const Eigen::MatrixXd& adjacency, const std::vector<int>& assignment, double resolution) {
    const Eigen::Index n = adjacency.rows();
    if (static_cast<std::size_t>(n) != assignment.size()) throw ValidationError("assignment length mismatch");
    const double two_m = adjacency.sum();
    if (!(two_m > 0.0)) return 0.0;
    const Eigen::VectorXd k = adjacency.rowwise().sum();
    const int clusters = assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
    std::vector<double> internal(static_cast<std::size_t>(clusters), 0.0);
    std::vector<double> total(static_cast<std::size_t>(clusters), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ci = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
        total[ci] += k[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (assignment[static_cast<std::size_t>(j)] == assignment[static_cast<std::size_t>(i)]) internal[ci] += adjacency(i, j);
        }
    }
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c) {
        q += internal[c] / two_m - resolution * (total[c] / two_m) * (total[c] / two_m);
    }
    return q;
}

namespace {

// Weighted graph for one Louvain level. self_loop[i] holds the internal weight
// of an aggregated node counted over ordered pairs, so strength[i] equals the
// summed degrees of its members.
struct LevelGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
    std::vector<double> self_loop;
    std::vector<double> strength;
};

LevelGraph from_adjacency(const Eigen::MatrixXd& a) {
    const auto n = static_cast<std::size_t>(a.rows());
    LevelGraph g;
    g.neighbors.resize(n);
    g.self_loop.assign(n, 0.0);
    g.strength.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (w == 0.0) continue;
            if (i == j) {
                g.self_loop[i] += w;
            } else {
                g.neighbors[i].emplace_back(j, w);
            }
            g.strength[i] += w;
        }
    }
    return g;
}

// Local moving phase. Returns true when any node changed community.
bool local_moving(const LevelGraph& g, std::vector<std::size_t>& community, double two_m, double resolution,
                  Xoshiro256& rng) {
    const std::size_t n = g.neighbors.size();
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) total[community[i]] += g.strength[i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t node : order) {
            const std::size_t current = community[node];
            const double ki = g.strength[node];
            touched.clear();
            for (const auto& [nb, w] : g.neighbors[node]) {
                const std::size_t c = community[nb];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            total[current] -= ki;
            // Gain of inserting node into c, up to a positive constant factor.
            auto gain = [&](std::size_t c) { return link[c] - resolution * total[c] * ki / two_m; };
            std::size_t best = current;
            double best_gain = gain(current);
            std::sort(touched.begin(), touched.end());
            for (std::size_t c : touched) {
                const double gc = gain(c);
                if (gc > best_gain + 1e-14 * std::max(1.0, std::abs(best_gain))) {
                    best_gain = gc;
                    best = c;
                }
            }
            total[best] += ki;
            for (std::size_t c : touched) link[c] = 0.0;
            if (best != current) {
                community[node] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

} // namespace

ClusterResult louvain(const CoOccurrenceNetwork& net, double resolution, std::uint64_t seed) {
    const auto n = net.size();
    if (n == 0) throw ValidationError("cannot cluster an empty graph");
    if (!(resolution > 0.0)) throw ValidationError("resolution must be positive");
    if ((net.adjacency.array() < 0.0).any()) throw ValidationError("Louvain needs non-negative weights");

    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), std::size_t{0});
    const double two_m = net.adjacency.sum();
    Xoshiro256 rng(seed);

    if (two_m > 0.0) {
        LevelGraph g = from_adjacency(net.adjacency);
        while (true) {
            const std::size_t level_n = g.neighbors.size();
            std::vector<std::size_t> community(level_n);
            std::iota(community.begin(), community.end(), std::size_t{0});
            if (!local_moving(g, community, two_m, resolution, rng)) break;

            // Renumber communities and aggregate.
            std::vector<std::size_t> relabel(level_n, level_n);
            std::size_t next = 0;
            for (std::size_t i = 0; i < level_n; ++i) {
                if (relabel[community[i]] == level_n) relabel[community[i]] = next++;
            }
            for (auto& m : membership) m = relabel[community[m]];

            LevelGraph agg;
            agg.neighbors.resize(next);
            agg.self_loop.assign(next, 0.0);
            agg.strength.assign(next, 0.0);
            std::vector<std::unordered_map<std::size_t, double>> links(next);
            for (std::size_t i = 0; i < level_n; ++i) {
                const std::size_t ci = relabel[community[i]];
                agg.self_loop[ci] += g.self_loop[i];
                agg.strength[ci] += g.strength[i];
                for (const auto& [j, w] : g.neighbors[i]) {
                    const std::size_t cj = relabel[community[j]];
                    if (ci == cj) {
                        agg.self_loop[ci] += w;
                    } else {
                        links[ci][cj] += w;
                    }
                }
            }
            for (std::size_t c = 0; c < next; ++c) {
                agg.neighbors[c].assign(links[c].begin(), links[c].end());
                std::sort(agg.neighbors[c].begin(), agg.neighbors[c].end());
            }
            if (next == level_n) break;
            g = std::move(agg);
        }
    }

    ClusterResult out;
    std::vector<int> relabel(n, -1);
    out.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (relabel[membership[i]] < 0) relabel[membership[i]] = out.n_clusters++;
        out.assignment[i] = relabel[membership[i]];
    }
    out.modularity_q = modularity(net.adjacency, out.assignment, resolution);
    return out;
}

ClusterResult louvain_best(const CoOccurrenceNetwork& net, double resolution, int n_seeds, std::uint64_t master_seed) {
    if (n_seeds < 1) throw ValidationError("need at least one Louvain seed");
    ClusterResult best;
    for (int s = 0; s < n_seeds; ++s) {
        ClusterResult run = louvain(net, resolution, derive_seed(master_seed, {static_cast<std::uint64_t>(s)}));
        if (s == 0 || run.modularity_q > best.modularity_q) best = std::move(run);
    }
    return best;
}

Eigen::MatrixXd shortest_path_lengths(const CoOccurrenceNetwork& net) {
    const auto n = static_cast<Eigen::Index>(net.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, inf);
    using Item = std::pair<double, Eigen::Index>;
    for (Eigen::Index s = 0; s < n; ++s) {
        auto row = dist.row(s);
        row[s] = 0.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, s);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > row[u]) continue;
            for (Eigen::Index v = 0; v < n; ++v) {
                const double w = net.adjacency(u, v);
                if (w <= 0.0 || v == u) continue;
                const double nd = d + 1.0 / w;
                if (nd < row[v]) {
                    row[v] = nd;
                    heap.emplace(nd, v);
                }
            }
        }
    }
    return dist;
}

CentralityReport centralities(const CoOccurrenceNetwork& net) {
    const auto n = static_cast<Eigen::Index>(net.size());
    CentralityReport out;
    out.degree = net.adjacency.rowwise().sum();
    out.closeness = Eigen::VectorXd::Zero(n);
    if (n < 2) return out;
    const Eigen::MatrixXd dist = shortest_path_lengths(net);
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i && std::isfinite(dist(i, j))) sum += 1.0 / dist(i, j);
        }
        out.closeness[i] = sum / static_cast<double>(n - 1);
    }
    return out;
}

namespace {

std::vector<int> ranks_descending(const Eigen::VectorXd& values) {
    std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[static_cast<Eigen::Index>(a)] > values[static_cast<Eigen::Index>(b)];
    });
    std::vector<int> rank(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r) + 1;
    return rank;
}

} // namespace

GroupLocation locate_group(const CoOccurrenceNetwork& net, const Eigen::VectorXd& importance, std::size_t top_k,
                           const ClusterResult& clusters, const CentralityReport& centrality, double edge_threshold) {
    const std::size_t n = net.size();
    if (static_cast<std::size_t>(importance.size()) != n) throw ValidationError("importance length does not match network");
    if (clusters.assignment.size() != n) throw ValidationError("cluster assignment does not match network");
    if (top_k > n) throw ValidationError("top_k exceeds the number of taxa");

    GroupLocation out;
    out.top = top_taxa(importance, top_k);
    std::vector<bool> is_top(n, false);
    for (auto i : out.top) is_top[i] = true;
    auto linked = [&](std::size_t a, std::size_t b) {
        return a != b && net.adjacency(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) > edge_threshold;
    };

    std::vector<int> seen_clusters;
    for (auto i : out.top) seen_clusters.push_back(clusters.assignment[i]);
    std::sort(seen_clusters.begin(), seen_clusters.end());
    out.cluster_spread = static_cast<int>(std::unique(seen_clusters.begin(), seen_clusters.end()) - seen_clusters.begin());

    for (auto i : out.top) {
        for (auto j : out.top) {
            if (linked(i, j)) {
                ++out.connected_to_top;
                break;
            }
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (is_top[v]) continue;
        int hits = 0;
        for (auto i : out.top) hits += linked(v, i) ? 1 : 0;
        if (hits >= 2) ++out.common_neighbors;
    }

    const auto degree_rank = ranks_descending(centrality.degree);
    const auto closeness_rank = ranks_descending(centrality.closeness);
    for (auto i : out.top) {
        out.degree_rank.push_back(degree_rank[i]);
        out.closeness_rank.push_back(closeness_rank[i]);
    }
    return out;
}

void write_node_metrics(const std::filesystem::path& path, const CoOccurrenceNetwork& net,
                        const ClusterResult& clusters, const CentralityReport& centrality, int significant_digits) {
    TextTable table;
    table.header = {"taxon", "cluster", "degree", "closeness"};
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        table.rows.push_back({net.taxon_labels[i], std::to_string(clusters.assignment[i]),
                              format_number(centrality.degree[ii], significant_digits),
                              format_number(centrality.closeness[ii], significant_digits)});
    }
    write_table(path, table);
}

} // namespace coresp
