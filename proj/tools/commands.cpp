#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include <fmt/format.h>

#include "coresp/analytics.hpp"
#include "coresp/error.hpp"
#include "coresp/evaluation.hpp"
#include "coresp/importance.hpp"
#include "coresp/ingest.hpp"
#include "coresp/network.hpp"
#include "coresp/random.hpp"
#include "coresp/stats.hpp"
#include "coresp/synth.hpp"
#include "coresp/table.hpp"

namespace coresp::cli {

namespace fs = std::filesystem;

namespace {

// Seed streams per subcommand, so two subcommands never share random numbers.
enum SeedTag : std::uint64_t { select_k_tag = 1, discover_tag, evaluate_tag, analyze_tag, synth_tag };

struct Dataset {
    AbundanceMatrix abundance;
    FunctionalVariable function;
};

Dataset load_dataset(const fs::path& dir) {
    Dataset d;
    d.abundance = load_abundance(dir / "abundance.csv");
    d.function = load_functional(dir / "function.csv", d.abundance.sample_ids);
    return d;
}

std::optional<CoOccurrenceNetwork> load_graph(const GraphSource& src, const std::vector<std::string>& labels) {
    if (src.no_graph) return std::nullopt;
    const fs::path path = src.adjacency.empty() ? src.dataset / "adjacency.csv" : src.adjacency;
    auto load = load_adjacency(path, labels);
    for (const auto& w : load.warnings) std::cerr << "warning: " << w << '\n';
    return std::move(load.network);
}

std::string num(double v) { return format_number(v, report_digits); }

void write_key_values(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& entries) {
    TextTable t;
    t.header = {"key", "value"};
    for (const auto& [k, v] : entries) t.rows.push_back({k, v});
    write_table(path, t);
}

AicForm parse_aic_form(const std::string& text) {
    if (text == "standard") return AicForm::standard;
    if (text == "negated") return AicForm::negated_penalty;
    throw ValidationError(fmt::format("unknown AIC form '{}' (expected standard or negated)", text));
}

} // namespace

OptimizerConfig GaOptions::to_config(const GlobalOptions& global) const {
    OptimizerConfig cfg;
    cfg.mode = parse_penalty_mode(mode);
    cfg.k_opt = k;
    cfg.mu = mu;
    cfg.population_size = population;
    cfg.max_generations = generations;
    cfg.stagnation_limit = stagnation;
    cfg.crossover_prob = crossover;
    cfg.mutation_prob = mutation;
    cfg.elite_fraction = elite_fraction;
    cfg.seed = global.seed;
    cfg.threads = global.threads;
    cfg.validate();
    return cfg;
}

void run_ingest(const IngestOptions& o, const GlobalOptions&) {
    auto h = load_abundance(o.abundance, o.taxa_as_rows ? Orientation::taxa_as_rows : Orientation::samples_as_rows);
    const auto p_in = h.n_taxa();
    if (!o.skip_filter) h = filter_sparse_taxa(h, o.max_zero_fraction);
    if (!o.skip_css) h = css_normalize(h, CssOptions{o.css_quantile, o.css_scale});
    const auto y = load_functional(o.function, h.sample_ids);
    write_abundance(o.out / "abundance.csv", h, report_digits);
    write_functional(o.out / "function.csv", y, report_digits);
    std::cout << fmt::format("{} samples, {} of {} taxa kept\n", h.n_samples(), h.n_taxa(), p_in);
}

void run_infer_net(const InferNetOptions& o, const GlobalOptions& g) {
    const auto h = load_abundance(o.dataset / "abundance.csv");
    NetworkInferenceConfig cfg;
    cfg.mu1 = o.mu1;
    cfg.mu2 = o.mu2;
    cfg.max_iterations = o.max_iterations;
    cfg.tolerance = o.tolerance;
    cfg.threads = g.threads;
    const auto net = infer_network(h, cfg);
    write_adjacency(o.out / "adjacency.csv", net, report_digits);
    write_edge_list(o.out / "edges.csv", net, o.edge_threshold, report_digits);
    const auto edges = ((net.adjacency.array() > o.edge_threshold).count()) / 2;
    std::cout << fmt::format("{} taxa, {} edges\n", net.size(), edges);
}

void run_select_k(const SelectKOptions& o, const GlobalOptions& g) {
    const auto d = load_dataset(o.graph.dataset);
    const auto graph = load_graph(o.graph, d.abundance.taxon_labels);
    const auto topo = graph ? convolve(d.abundance, *graph)
                            : convolve(d.abundance, CoOccurrenceNetwork::empty_graph(d.abundance.taxon_labels));
    auto cfg = o.ga.to_config(g);
    cfg.mode = PenaltyMode::size_cap;
    cfg.seed = derive_seed(g.seed, {select_k_tag});
    SweepOptions sweep;
    sweep.k_min = o.k_min;
    sweep.k_max = o.k_max;
    sweep.repeats = o.repeats;
    sweep.form = parse_aic_form(o.aic_form);
    sweep.threads = g.threads;
    const auto res = sweep_k(topo.values, d.function.values, cfg, sweep);

    write_sweep(o.out / "sweep.csv", res, report_digits);
    TextTable per_k;
    per_k.header = {"k", "mean_aic", "chosen"};
    for (const auto& s : res.per_k)
        per_k.rows.push_back({std::to_string(s.k), num(s.mean_aic), s.k == res.chosen_k ? "1" : "0"});
    write_table(o.out / "aic_by_k.csv", per_k);
    std::cout << fmt::format("chosen k = {}\n", res.chosen_k);
}

void run_discover(const DiscoverOptions& o, const GlobalOptions& g) {
    const auto d = load_dataset(o.graph.dataset);
    const auto graph = load_graph(o.graph, d.abundance.taxon_labels);
    DiscoveryConfig cfg;
    cfg.optimizer = o.ga.to_config(g);
    cfg.optimizer.seed = derive_seed(g.seed, {discover_tag});
    cfg.runs = o.runs;
    cfg.top_k = o.top_k;
    cfg.threads = g.threads;
    cfg.tuning_repeats = o.tuning_repeats;
    if (cfg.optimizer.mode == PenaltyMode::l1) {
        if (!o.mu_grid.empty()) cfg.mu_grid = o.mu_grid;
        else if (o.tune_mu) cfg.mu_grid = default_mu_grid();
    }
    const auto res = discover_importance(d.abundance, graph ? &*graph : nullptr, d.function, cfg);
    const auto& labels = d.abundance.taxon_labels;

    write_importance_nodes(o.out / "importance_nodes.csv", res, labels, report_digits);
    write_importance_edges(o.out / "importance_edges.csv", res.importance, labels, report_digits);
    write_importance_graphml(o.out / "importance.graphml", res, labels, o.edge_threshold);
    write_runs(o.out / "runs.csv", res.importance, report_digits);
    TextTable group;
    group.header = {"rank", "taxon", "importance"};
    for (std::size_t i = 0; i < res.top.size(); ++i) {
        const auto j = res.top[i];
        group.rows.push_back({std::to_string(i + 1), labels[j],
                              num(res.importance.taxon_importance[static_cast<Eigen::Index>(j)])});
    }
    write_table(o.out / "top_group.csv", group);
    write_key_values(o.out / "discover_summary.csv", {{"mode", std::string(to_string(cfg.optimizer.mode))},
                                                       {"mu", num(res.mu_used)},
                                                       {"runs", std::to_string(res.importance.runs)},
                                                       {"top_k", std::to_string(res.top.size())},
                                                       {"top_r", num(res.top_r)},
                                                       {"top_p", num(res.top_p)}});
    std::cout << fmt::format("top {} taxa: r = {}, p = {}\n", res.top.size(), num(res.top_r), num(res.top_p));
}

void run_evaluate(const EvaluateOptions& o, const GlobalOptions& g) {
    const auto d = load_dataset(o.graph.dataset);
    const auto graph = load_graph(o.graph, d.abundance.taxon_labels);
    const auto base = o.ga.to_config(g);

    EvaluationProtocol proto;
    proto.repeats = o.repeats;
    proto.fraction = o.fraction;
    proto.n_strata = o.strata;
    proto.seed = derive_seed(g.seed, {evaluate_tag});
    proto.threads = g.threads;

    std::vector<EvaluationReport> reports;
    for (const auto& tag : o.methods) {
        MethodSpec m;
        m.tag = tag;
        m.optimizer = base;
        m.tuning_repeats = o.tuning_repeats;
        if (tag == "graph" || tag == "raw") {
            m.optimizer.mode = PenaltyMode::size_cap;
        } else if (tag == "graph_l1" || tag == "raw_l1") {
            m.optimizer.mode = PenaltyMode::l1;
            m.mu_grid = o.mu_grid.empty() ? default_mu_grid() : o.mu_grid;
        } else {
            throw ValidationError(fmt::format("unknown method '{}' (expected graph, raw, graph_l1 or raw_l1)", tag));
        }
        m.use_graph = tag.starts_with("graph");
        if (m.use_graph && !graph) throw ValidationError(fmt::format("method '{}' needs a network", tag));
        reports.push_back(evaluate_method(d.abundance, graph ? &*graph : nullptr, d.function, m, proto));
        std::cout << fmt::format("{}: mean r = {}, std = {}\n", tag, num(reports.back().mean_r),
                                 num(reports.back().std_r));
    }
    write_report_table(o.out / "evaluation.csv", reports, report_digits);
    write_report_summary(o.out / "evaluation_summary.csv", reports, report_digits);

    TextTable tests;
    tests.header = {"method_a", "method_b", "t", "df", "p", "significant"};
    for (std::size_t a = 0; a < reports.size(); ++a) {
        for (std::size_t b = a + 1; b < reports.size(); ++b) {
            std::vector<std::string> row{reports[a].method_tag, reports[b].method_tag};
            try {
                const auto t = paired_t_test(reports[a].per_repeat_test_r, reports[b].per_repeat_test_r, o.alpha);
                row.insert(row.end(), {num(t.t), num(t.degrees_of_freedom), num(t.p), t.significant ? "1" : "0"});
            } catch (const NumericError& e) {
                std::cerr << fmt::format("warning: {} vs {}: {}\n", row[0], row[1], e.what());
                row.insert(row.end(), {"NA", "NA", "NA", "0"});
            }
            tests.rows.push_back(std::move(row));
        }
    }
    write_table(o.out / "ttests.csv", tests);
}

void run_analyze(const AnalyzeOptions& o, const GlobalOptions& g) {
    const auto imp = read_importance_nodes(o.importance);
    auto load = load_adjacency(o.adjacency, imp.labels);
    for (const auto& w : load.warnings) std::cerr << "warning: " << w << '\n';
    const auto& net = load.network;

    const auto clusters = louvain_best(net, o.resolution, o.louvain_seeds, derive_seed(g.seed, {analyze_tag}));
    const auto cent = centralities(net);
    const auto loc = locate_group(net, imp.importance, o.top_k, clusters, cent, o.edge_threshold);

    write_node_metrics(o.out / "node_metrics.csv", net, clusters, cent, report_digits);
    TextTable top;
    top.header = {"taxon", "importance", "cluster", "degree_rank", "closeness_rank"};
    for (std::size_t i = 0; i < loc.top.size(); ++i) {
        const auto j = loc.top[i];
        top.rows.push_back({imp.labels[j], num(imp.importance[static_cast<Eigen::Index>(j)]),
                            std::to_string(clusters.assignment[j]), std::to_string(loc.degree_rank[i]),
                            std::to_string(loc.closeness_rank[i])});
    }
    write_table(o.out / "group_location.csv", top);

    std::vector<std::pair<std::string, std::string>> summary{
        {"modularity", num(clusters.modularity_q)},
        {"clusters", std::to_string(clusters.n_clusters)},
        {"top_k", std::to_string(loc.top.size())},
        {"cluster_spread", std::to_string(loc.cluster_spread)},
        {"connected_to_top", std::to_string(loc.connected_to_top)},
        {"common_neighbors", std::to_string(loc.common_neighbors)}};
    if (!o.dataset.empty()) {
        const auto d = load_dataset(o.dataset);
        if (d.abundance.taxon_labels != imp.labels)
            throw ValidationError("dataset taxa do not match the importance table");
        const auto topo = convolve(d.abundance, net);
        const Eigen::VectorXd s = topo.values * GroupChromosome::from_indices(net.size(), loc.top).as_vector();
        const auto test = correlation_test(s, d.function.values);
        summary.push_back({"top_r", num(test.r)});
        summary.push_back({"top_p", num(test.p)});
    }
    write_key_values(o.out / "analysis_summary.csv", summary);
    std::cout << fmt::format("Q = {} over {} clusters; top {} taxa span {} clusters\n", num(clusters.modularity_q),
                             clusters.n_clusters, loc.top.size(), loc.cluster_spread);
}

void run_synth(const SynthOptions& o, const GlobalOptions& g) {
    SynthSpec spec;
    spec.n_samples = o.n_samples;
    spec.n_taxa = o.n_taxa;
    spec.n_blocks = o.blocks;
    spec.intra_block_weight = o.intra;
    spec.inter_block_weight = o.inter;
    spec.noise_sigma = o.noise;
    spec.seed = derive_seed(g.seed, {synth_tag});
    spec.planted_group = o.planted.empty() ? random_group(o.n_taxa, o.group_size, derive_seed(g.seed, {synth_tag, 1}))
                                           : o.planted;
    const auto bundle = generate(spec);
    write_bundle(o.out, bundle, report_digits);
    std::cout << fmt::format("{} samples x {} taxa, planted group of {}\n", spec.n_samples, spec.n_taxa,
                             bundle.ground_truth.size());
}

} // namespace coresp::cli
