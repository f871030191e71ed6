#include "coresp/importance.hpp"

#include "coresp/error.hpp"
#include "coresp/graphml.hpp"
#include "coresp/model_select.hpp"
#include "coresp/parallel.hpp"
#include "coresp/random.hpp"
#include "coresp/stats.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace coresp {

ImportanceResult aggregate_importance(std::span<const RunOutcome> runs) {
    if (runs.empty()) throw ValidationError("importance needs at least one run");
    const std::size_t p = runs.front().group.size();
    for (const auto& run : runs) {
        if (run.group.size() != p) throw ValidationError("importance runs have different chromosome lengths");
    }
    const auto pp = static_cast<Eigen::Index>(p);
    const auto t = static_cast<double>(runs.size());

    ImportanceResult out;
    out.runs = runs.size();
    out.per_run.assign(runs.begin(), runs.end());
    out.taxon_importance = Eigen::VectorXd::Zero(pp);
    out.pair_importance = Eigen::MatrixXd::Zero(pp, pp);
    for (Eigen::Index i = 0; i < pp; ++i) {
        for (Eigen::Index j = 0; j < pp; ++j) {
            double sum = 0.0;
            for (const auto& run : runs) {
                const double xi = run.group.test(static_cast<std::size_t>(i)) ? 1.0 : 0.0;
                const double xj = run.group.test(static_cast<std::size_t>(j)) ? 1.0 : 0.0;
                sum += run.r * xi * xj;
            }
            out.pair_importance(i, j) = sum / t;
        }
        double sum = 0.0;
        for (const auto& run : runs) {
            const double xi = run.group.test(static_cast<std::size_t>(i)) ? 1.0 : 0.0;
            sum += run.r * xi;
        }
        out.taxon_importance[i] = sum / t;
    }
    return out;
}

std::vector<std::size_t> top_taxa(const Eigen::VectorXd& importance, std::size_t top_k) {
    std::vector<std::size_t> order(static_cast<std::size_t>(importance.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return importance[static_cast<Eigen::Index>(a)] > importance[static_cast<Eigen::Index>(b)];
    });
    order.resize(std::min(top_k, order.size()));
    return order;
}

DiscoveryResult discover_importance(const AbundanceMatrix& abundance, const CoOccurrenceNetwork* network,
                                    const FunctionalVariable& y, const DiscoveryConfig& cfg) {
    if (cfg.runs < 1) throw ValidationError("discovery runs must be positive");
    if (y.size() != abundance.n_samples()) throw ValidationError("functional variable does not match samples");

    const Eigen::Index p = abundance.values.cols();
    const Eigen::MatrixXd op = network ? convolution_operator(network->adjacency) : Eigen::MatrixXd::Identity(p, p);
    if (op.rows() != p) throw ValidationError("network does not match abundance taxa");
    const TopologicalAbundance topo = convolve_rows(abundance.values, op);
    const Eigen::VectorXd y0 = center(y.values);

    OptimizerConfig base = cfg.optimizer;
    DiscoveryResult result;
    if (base.mode == PenaltyMode::l1 && !cfg.mu_grid.empty()) {
        MuTuningOptions inner;
        inner.inner_repeats = cfg.tuning_repeats;
        inner.threads = cfg.threads;
        base.mu = tune_mu(topo.values, y.values, cfg.mu_grid, base, inner).chosen_mu;
    }
    result.mu_used = base.mu;

    std::vector<RunOutcome> runs(static_cast<std::size_t>(cfg.runs));
    parallel_for(runs.size(), cfg.threads, [&](std::size_t i) {
        OptimizerConfig run_cfg = base;
        run_cfg.threads = 1;
        run_cfg.seed = derive_seed(cfg.optimizer.seed, {0x72756e, i});
        const GaResult ga = run_ga(topo.centered, y0, run_cfg);
        runs[i] = {ga.best, ga.best_eval.pearson_r};
    });
    result.importance = aggregate_importance(runs);

    const std::size_t top_k = cfg.top_k > 0 ? cfg.top_k : static_cast<std::size_t>(std::max(base.k_opt, 1));
    result.top = top_taxa(result.importance.taxon_importance, top_k);
    const GroupChromosome top_group = GroupChromosome::from_indices(static_cast<std::size_t>(p), result.top);
    const CorrelationTest test = correlation_test(topo.values * top_group.as_vector(), y.values);
    result.top_r = test.r;
    result.top_p = test.p;
    result.mean_abundance = abundance.values.colwise().mean().transpose();
    return result;
}

void write_importance_nodes(const std::filesystem::path& path, const DiscoveryResult& result,
                            const std::vector<std::string>& labels, int significant_digits) {
    const auto& imp = result.importance.taxon_importance;
    if (labels.size() != static_cast<std::size_t>(imp.size())) throw ValidationError("label count mismatch");
    std::vector<bool> is_top(labels.size(), false);
    for (auto i : result.top) is_top[i] = true;
    TextTable table;
    table.header = {"taxon", "importance", "mean_abundance", "top"};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double abundance = result.mean_abundance.size() == imp.size() ? result.mean_abundance[ii] : 0.0;
        table.rows.push_back({labels[i], format_number(imp[ii], significant_digits),
                              format_number(abundance, significant_digits), is_top[i] ? "1" : "0"});
    }
    write_table(path, table);
}

void write_importance_edges(const std::filesystem::path& path, const ImportanceResult& result,
                            const std::vector<std::string>& labels, int significant_digits) {
    const auto& pair = result.pair_importance;
    if (labels.size() != static_cast<std::size_t>(pair.rows())) throw ValidationError("label count mismatch");
    TextTable table;
    table.header = {"taxon_a", "taxon_b", "weight"};
    for (Eigen::Index i = 0; i < pair.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < pair.cols(); ++j) {
            if (pair(i, j) == 0.0) continue;
            table.rows.push_back({labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)],
                                  format_number(pair(i, j), significant_digits)});
        }
    }
    write_table(path, table);
}

void write_importance_graphml(const std::filesystem::path& path, const DiscoveryResult& result,
                              const std::vector<std::string>& labels, double threshold) {
    const auto& imp = result.importance.taxon_importance;
    const auto& pair = result.importance.pair_importance;
    GraphDocument graph;
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index i = 0; i < imp.size(); ++i) {
        if (imp[i] != 0.0) nodes.push_back(i);
    }
    std::vector<double> importance;
    std::vector<double> abundance;
    std::vector<std::int64_t> top;
    for (auto i : nodes) {
        graph.node_ids.push_back(labels[static_cast<std::size_t>(i)]);
        importance.push_back(imp[i]);
        abundance.push_back(result.mean_abundance.size() == imp.size() ? result.mean_abundance[i] : 0.0);
        top.push_back(std::find(result.top.begin(), result.top.end(), static_cast<std::size_t>(i)) != result.top.end());
    }
    graph.real_node_attributes = {{"importance", importance}, {"mean_abundance", abundance}};
    graph.int_node_attributes = {{"top", top}};
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double w = pair(nodes[a], nodes[b]);
            if (w != 0.0 && std::abs(w) >= threshold) graph.edges.push_back({a, b, w});
        }
    }
    write_graphml(path, graph);
}

void write_runs(const std::filesystem::path& path, const ImportanceResult& result, int significant_digits) {
    TextTable table;
    table.header = {"run", "r", "group_bits"};
    for (std::size_t i = 0; i < result.per_run.size(); ++i) {
        table.rows.push_back({std::to_string(i), format_number(result.per_run[i].r, significant_digits),
                              result.per_run[i].group.to_string()});
    }
    write_table(path, table);
}

ImportanceTable read_importance_nodes(const std::filesystem::path& path) {
    const TextTable table = read_table(path);
    const std::string source = path.string();
    if (table.header.size() < 2 || table.header[0] != "taxon" || table.header[1] != "importance") {
        throw ParseError(fmt::format("{}: expected columns taxon, importance", source));
    }
    ImportanceTable out;
    out.importance.resize(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out.labels.push_back(table.rows[i][0]);
        out.importance[static_cast<Eigen::Index>(i)] = parse_number(table.rows[i][1], i + 2, 2, source);
    }
    return out;
}

} // namespace coresp
