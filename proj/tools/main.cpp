#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coresp/error.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace coresp;
using namespace coresp::cli;

namespace {

enum ExitCode : int { ok = 0, failure = 1, usage = 2, parse = 3, validation = 4, numeric = 5, io = 6 };

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parse: return parse;
    case ErrorKind::validation: return validation;
    case ErrorKind::numeric: return numeric;
    case ErrorKind::io: return io;
    }
    return failure;
}

// Defaults in shortest round-trip form, so a config snapshot replays exactly.
template <typename T>
std::string exact(const T& value) {
    return fmt::format("{}", value);
}

void add_ga_options(CLI::App* cmd, GaOptions& ga) {
    cmd->add_option("--mode", ga.mode, "Penalty mode")->check(CLI::IsMember({"size_cap", "l1"}))
        ->default_str(exact(ga.mode));
    cmd->add_option("--k", ga.k, "Group size cap (size_cap mode)")->check(CLI::PositiveNumber)->default_str(exact(ga.k));
    cmd->add_option("--mu", ga.mu, "l1 penalty weight")->check(CLI::NonNegativeNumber)->default_str(exact(ga.mu));
    cmd->add_option("--population", ga.population, "GA population size")
        ->default_str(exact(ga.population));
    cmd->add_option("--generations", ga.generations, "Maximum generations")
        ->default_str(exact(ga.generations));
    cmd->add_option("--stagnation", ga.stagnation, "Generations without improvement before stopping")
        ->default_str(exact(ga.stagnation));
    cmd->add_option("--crossover", ga.crossover, "Crossover probability")
        ->default_str(exact(ga.crossover));
    cmd->add_option("--mutation", ga.mutation, "Mutation probability")
        ->default_str(exact(ga.mutation));
    cmd->add_option("--elite-fraction", ga.elite_fraction, "Fraction of elites kept")
        ->default_str(exact(ga.elite_fraction));
}

void add_graph_options(CLI::App* cmd, GraphSource& graph) {
    cmd->add_option("--dataset", graph.dataset, "Directory with abundance.csv and function.csv")
        ->required()
        ->check(CLI::ExistingDirectory);
    auto* adj = cmd->add_option("--adjacency", graph.adjacency, "Adjacency matrix or edge list "
                                                                "(default: <dataset>/adjacency.csv)")
                    ->check(CLI::ExistingFile);
    cmd->add_flag("--no-graph", graph.no_graph, "Use raw group abundance (identity operator)")->excludes(adj);
}

void add_out(CLI::App* cmd, fs::path& out) {
    cmd->add_option("--out", out, "Output directory")->required();
}

// Global options plus those of the subcommand that ran.
void write_snapshot(const CLI::App& app, const CLI::App& cmd, const fs::path& out) {
    fs::create_directories(out);
    std::ofstream f(out / "resolved_config.ini");
    if (!f) throw IoError(fmt::format("cannot write {}", (out / "resolved_config.ini").string()));
    f << "# coresp " << tool_version << ", format " << format_version << '\n';
    std::istringstream all(app.config_to_str(true, false));
    const std::string prefix = cmd.get_name() + ".";
    for (std::string line; std::getline(all, line);) {
        const auto eq = line.find('=');
        const auto key = line.substr(0, eq);
        if (eq == std::string::npos || line.ends_with("=\"\"")) continue;  // unset options
        if (key.find('.') == std::string::npos || key.starts_with(prefix)) f << line << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional co-response group discovery on microbial co-occurrence networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value configuration file; command-line flags take precedence");
    app.set_version_flag("--version", fmt::format("coresp {} (table format {})", tool_version, format_version));

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Master seed")
        ->default_str(exact(global.seed));
    app.add_option("--threads", global.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->default_str(exact(global.threads));

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Filter and normalize an abundance table");
    c_ingest->add_option("--abundance", ingest.abundance, "Abundance table")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--function", ingest.function, "Functional variable table (sample_id, value)")
        ->required()
        ->check(CLI::ExistingFile);
    c_ingest->add_flag("--taxa-as-rows", ingest.taxa_as_rows, "Input has taxa as rows");
    c_ingest->add_option("--max-zero-fraction", ingest.max_zero_fraction, "Drop taxa with more zeros than this")
        ->default_str(exact(ingest.max_zero_fraction));
    c_ingest->add_flag("--no-filter", ingest.skip_filter, "Keep sparse taxa");
    c_ingest->add_flag("--no-css", ingest.skip_css, "Skip CSS normalization");
    c_ingest->add_option("--css-quantile", ingest.css_quantile, "CSS quantile")
        ->default_str(exact(ingest.css_quantile));
    c_ingest->add_option("--css-scale", ingest.css_scale, "CSS scale constant")
        ->default_str(exact(ingest.css_scale));
    add_out(c_ingest, ingest.out);

    InferNetOptions infer;
    auto* c_infer = app.add_subcommand("infer-net", "Infer a co-occurrence network from abundances");
    c_infer->add_option("--dataset", infer.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    c_infer->add_option("--mu1", infer.mu1, "l1 penalty")->default_str(exact(infer.mu1));
    c_infer->add_option("--mu2", infer.mu2, "Squared-norm penalty")->default_str(exact(infer.mu2));
    c_infer->add_option("--max-iterations", infer.max_iterations, "Coordinate descent sweeps")
        ->default_str(exact(infer.max_iterations));
    c_infer->add_option("--tolerance", infer.tolerance, "Convergence tolerance")
        ->default_str(exact(infer.tolerance));
    c_infer->add_option("--edge-threshold", infer.edge_threshold, "Edge list keeps weights above this")
        ->default_str(exact(infer.edge_threshold));
    add_out(c_infer, infer.out);

    SelectKOptions select;
    auto* c_select = app.add_subcommand("select-k", "Choose the group size by AIC");
    add_graph_options(c_select, select.graph);
    add_ga_options(c_select, select.ga);
    c_select->add_option("--k-min", select.k_min, "Smallest k")
        ->default_str(exact(select.k_min));
    c_select->add_option("--k-max", select.k_max, "Largest k")
        ->default_str(exact(select.k_max));
    c_select->add_option("--repeats", select.repeats, "GA runs per k")
        ->default_str(exact(select.repeats));
    c_select->add_option("--aic-form", select.aic_form, "AIC formula")
        ->check(CLI::IsMember({"standard", "negated"}))
        ->default_str(exact(select.aic_form));
    add_out(c_select, select.out);

    DiscoverOptions discover;
    auto* c_discover = app.add_subcommand("discover", "Find co-response groups and their importance network");
    add_graph_options(c_discover, discover.graph);
    add_ga_options(c_discover, discover.ga);
    c_discover->add_option("--mu-grid", discover.mu_grid, "Tune mu over these values (l1 mode)")->delimiter(',');
    c_discover->add_flag("--tune-mu", discover.tune_mu, "Tune mu over the default grid (l1 mode)");
    c_discover->add_option("--tuning-repeats", discover.tuning_repeats, "Inner splits for mu tuning")
        ->default_str(exact(discover.tuning_repeats));
    c_discover->add_option("--runs", discover.runs, "Independent GA runs")
        ->default_str(exact(discover.runs));
    c_discover->add_option("--top-k", discover.top_k, "Top taxa to report (0: k)")
        ->default_str(exact(discover.top_k));
    c_discover->add_option("--edge-threshold", discover.edge_threshold, "GraphML keeps |L_ij| at or above this")
        ->default_str(exact(discover.edge_threshold));
    add_out(c_discover, discover.out);

    EvaluateOptions evaluate;
    auto* c_eval = app.add_subcommand("evaluate", "Compare methods over repeated stratified splits");
    add_graph_options(c_eval, evaluate.graph);
    add_ga_options(c_eval, evaluate.ga);
    c_eval->add_option("--methods", evaluate.methods, "Methods: graph, raw, graph_l1, raw_l1")
        ->delimiter(',')
        ->capture_default_str();
    c_eval->add_option("--mu-grid", evaluate.mu_grid, "mu grid for l1 methods")->delimiter(',');
    c_eval->add_option("--tuning-repeats", evaluate.tuning_repeats, "Inner splits for mu tuning")
        ->default_str(exact(evaluate.tuning_repeats));
    c_eval->add_option("--repeats", evaluate.repeats, "Train/test splits")
        ->default_str(exact(evaluate.repeats));
    c_eval->add_option("--fraction", evaluate.fraction, "Training fraction")
        ->default_str(exact(evaluate.fraction));
    c_eval->add_option("--strata", evaluate.strata, "Strata on y")
        ->default_str(exact(evaluate.strata));
    c_eval->add_option("--alpha", evaluate.alpha, "t-test significance level")
        ->default_str(exact(evaluate.alpha));
    add_out(c_eval, evaluate.out);

    AnalyzeOptions analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Cluster the network and locate the top taxa");
    c_analyze->add_option("--adjacency", analyze.adjacency, "Adjacency matrix or edge list")
        ->required()
        ->check(CLI::ExistingFile);
    c_analyze->add_option("--importance", analyze.importance, "importance_nodes.csv from discover")
        ->required()
        ->check(CLI::ExistingFile);
    c_analyze->add_option("--dataset", analyze.dataset, "Dataset directory for the top-group correlation")
        ->check(CLI::ExistingDirectory);
    c_analyze->add_option("--top-k", analyze.top_k, "Number of top taxa")
        ->default_str(exact(analyze.top_k));
    c_analyze->add_option("--resolution", analyze.resolution, "Louvain resolution")
        ->default_str(exact(analyze.resolution));
    c_analyze->add_option("--louvain-seeds", analyze.louvain_seeds, "Louvain restarts")
        ->default_str(exact(analyze.louvain_seeds));
    c_analyze->add_option("--edge-threshold", analyze.edge_threshold, "Edges count above this weight")
        ->default_str(exact(analyze.edge_threshold));
    add_out(c_analyze, analyze.out);

    SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset with a planted group");
    c_synth->add_option("--samples", synth.n_samples, "Samples")
        ->default_str(exact(synth.n_samples));
    c_synth->add_option("--taxa", synth.n_taxa, "Taxa")
        ->default_str(exact(synth.n_taxa));
    c_synth->add_option("--blocks", synth.blocks, "Network blocks")
        ->default_str(exact(synth.blocks));
    c_synth->add_option("--intra", synth.intra, "Intra-block edge weight")
        ->default_str(exact(synth.intra));
    c_synth->add_option("--inter", synth.inter, "Inter-block edge weight")
        ->default_str(exact(synth.inter));
    auto* size_opt = c_synth->add_option("--group-size", synth.group_size, "Random planted group size")
        ->default_str(exact(synth.group_size));
    c_synth->add_option("--planted", synth.planted, "Planted taxon indices (0-based)")
        ->delimiter(',')
        ->excludes(size_opt);
    c_synth->add_option("--noise", synth.noise, "Noise sd relative to the signal")
        ->default_str(exact(synth.noise));
    add_out(c_synth, synth.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        const auto run = [&](CLI::App* cmd, const fs::path& out, auto&& body) {
            if (!cmd->parsed()) return false;
            write_snapshot(app, *cmd, out);
            body();
            return true;
        };
        run(c_ingest, ingest.out, [&] { run_ingest(ingest, global); }) ||
            run(c_infer, infer.out, [&] { run_infer_net(infer, global); }) ||
            run(c_select, select.out, [&] { run_select_k(select, global); }) ||
            run(c_discover, discover.out, [&] { run_discover(discover, global); }) ||
            run(c_eval, evaluate.out, [&] { run_evaluate(evaluate, global); }) ||
            run(c_analyze, analyze.out, [&] { run_analyze(analyze, global); }) ||
            run(c_synth, synth.out, [&] { run_synth(synth, global); });
    } catch (const Error& e) {
        std::cerr << fmt::format("error ({}): {}\n", to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
