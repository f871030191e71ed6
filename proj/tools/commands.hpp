#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coresp/ga.hpp"
#include "coresp/model_select.hpp"

namespace coresp::cli {

inline constexpr const char* tool_version = "0.3.0";
inline constexpr int format_version = 1;

struct GlobalOptions {
    std::uint64_t seed = 1;
    int threads = 1;
};

/// GA settings shared by every subcommand that searches for groups.
struct GaOptions {
    std::string mode = "size_cap";
    int k = 10;
    double mu = 1.0 / 30.0;
    int population = 200;
    int generations = 500;
    int stagnation = 50;
    double crossover = 0.8;
    double mutation = 0.1;
    double elite_fraction = 0.05;

    OptimizerConfig to_config(const GlobalOptions& global) const;
};

struct GraphSource {
    std::filesystem::path dataset;
    std::filesystem::path adjacency;  ///< empty: <dataset>/adjacency.csv
    bool no_graph = false;
};

struct IngestOptions {
    std::filesystem::path abundance;
    std::filesystem::path function;
    bool taxa_as_rows = false;
    double max_zero_fraction = 0.80;
    bool skip_filter = false;
    bool skip_css = false;
    double css_quantile = 0.5;
    double css_scale = 1000.0;
    std::filesystem::path out;
};

struct InferNetOptions {
    std::filesystem::path dataset;
    double mu1 = 0.1;
    double mu2 = 0.01;
    int max_iterations = 1000;
    double tolerance = 1e-7;
    double edge_threshold = 0.0;
    std::filesystem::path out;
};

struct SelectKOptions {
    GraphSource graph;
    GaOptions ga;
    int k_min = 2;
    int k_max = 50;
    int repeats = 10;
    std::string aic_form = "standard";
    std::filesystem::path out;
};

struct DiscoverOptions {
    GraphSource graph;
    GaOptions ga;
    std::vector<double> mu_grid;
    bool tune_mu = false;
    int tuning_repeats = 1;
    int runs = 10;
    std::size_t top_k = 0;
    double edge_threshold = 0.05;
    std::filesystem::path out;
};

struct EvaluateOptions {
    GraphSource graph;
    GaOptions ga;
    std::vector<std::string> methods{"graph", "raw", "graph_l1"};
    std::vector<double> mu_grid;
    int tuning_repeats = 1;
    int repeats = 100;
    double fraction = 0.5;
    int strata = 10;
    double alpha = 0.05;
    std::filesystem::path out;
};

struct AnalyzeOptions {
    std::filesystem::path adjacency;
    std::filesystem::path importance;
    std::filesystem::path dataset;  ///< optional: adds the top group's correlation with y
    std::size_t top_k = 10;
    double resolution = 1.0;
    int louvain_seeds = 10;
    double edge_threshold = 0.0;
    std::filesystem::path out;
};

struct SynthOptions {
    std::size_t n_samples = 100;
    std::size_t n_taxa = 60;
    std::size_t blocks = 4;
    double intra = 0.1;
    double inter = 0.01;
    std::size_t group_size = 6;
    std::vector<std::size_t> planted;
    double noise = 0.05;
    std::filesystem::path out;
};

void run_ingest(const IngestOptions& o, const GlobalOptions& g);
void run_infer_net(const InferNetOptions& o, const GlobalOptions& g);
void run_select_k(const SelectKOptions& o, const GlobalOptions& g);
void run_discover(const DiscoverOptions& o, const GlobalOptions& g);
void run_evaluate(const EvaluateOptions& o, const GlobalOptions& g);
void run_analyze(const AnalyzeOptions& o, const GlobalOptions& g);
void run_synth(const SynthOptions& o, const GlobalOptions& g);

} // namespace coresp::cli
