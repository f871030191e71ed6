#include "coresp/synth.hpp"

#include "coresp/error.hpp"
#include "coresp/random.hpp"
#include "coresp/stats.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace coresp {

void SynthSpec::validate() const {
    if (n_samples < 2 || n_taxa < 2) throw ValidationError("synthetic data needs at least two samples and two taxa");
    if (n_blocks < 1 || n_blocks > n_taxa) throw ValidationError("block count must lie in [1, n_taxa]");
    if (intra_block_weight < 0.0 || inter_block_weight < 0.0) throw ValidationError("block weights must be >= 0");
    if (intra_block_weight < inter_block_weight) throw ValidationError("intra-block weight must be >= inter-block weight");
    if (planted_group.empty()) throw ValidationError("planted group is empty");
    for (auto i : planted_group) {
        if (i >= n_taxa) throw ValidationError(fmt::format("planted index {} out of range", i));
    }
    if (!(noise_sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
    if (!(log_sd >= 0.0)) throw ValidationError("log-normal sd must be >= 0");
}

std::vector<std::size_t> random_group(std::size_t n_taxa, std::size_t size, std::uint64_t seed) {
    if (size > n_taxa) throw ValidationError("group larger than the number of taxa");
    std::vector<std::size_t> all(n_taxa);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Xoshiro256 rng(seed);
    for (std::size_t j = 0; j < size; ++j) std::swap(all[j], all[j + rng.below(n_taxa - j)]);
    all.resize(size);
    std::sort(all.begin(), all.end());
    return all;
}

SynthBundle generate(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n_samples);
    const auto p = static_cast<Eigen::Index>(spec.n_taxa);
    Xoshiro256 rng(spec.seed);

    SynthBundle out;
    for (Eigen::Index i = 0; i < n; ++i) out.abundance.sample_ids.push_back(fmt::format("S{:03d}", i + 1));
    for (Eigen::Index j = 0; j < p; ++j) out.abundance.taxon_labels.push_back(fmt::format("T{:03d}", j + 1));

    auto block = [&](Eigen::Index j) { return static_cast<std::size_t>(j) * spec.n_blocks / spec.n_taxa; };
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i != j) a(i, j) = block(i) == block(j) ? spec.intra_block_weight : spec.inter_block_weight;
        }
    }
    out.network = {std::move(a), out.abundance.taxon_labels};

    Eigen::MatrixXd raw(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) raw(i, j) = std::exp(spec.log_mean + spec.log_sd * rng.normal());
    }
    out.abundance.values = std::move(raw);
    out.abundance = css_normalize(out.abundance);

    const TopologicalAbundance topo = convolve(out.abundance, out.network);
    Eigen::VectorXd signal = Eigen::VectorXd::Zero(n);
    for (auto j : spec.planted_group) signal += topo.values.col(static_cast<Eigen::Index>(j));
    const double signal_sd = std::sqrt(center(signal).squaredNorm() / static_cast<double>(n));
    Eigen::VectorXd y = signal;
    for (Eigen::Index i = 0; i < n; ++i) y[i] += spec.noise_sigma * signal_sd * rng.normal();

    out.function.values = std::move(y);
    out.function.name = "function";
    out.function.sample_ids = out.abundance.sample_ids;
    out.ground_truth = spec.planted_group;
    std::sort(out.ground_truth.begin(), out.ground_truth.end());
    out.ground_truth.erase(std::unique(out.ground_truth.begin(), out.ground_truth.end()), out.ground_truth.end());
    out.expected_r = 1.0 / std::sqrt(1.0 + spec.noise_sigma * spec.noise_sigma);
    return out;
}

void write_bundle(const std::filesystem::path& dir, const SynthBundle& bundle, int significant_digits) {
    std::filesystem::create_directories(dir);
    write_abundance(dir / "abundance.csv", bundle.abundance, significant_digits);
    write_functional(dir / "function.csv", bundle.function, significant_digits);
    write_adjacency(dir / "adjacency.csv", bundle.network, significant_digits);
    TextTable truth;
    truth.header = {"index", "taxon", "expected_r"};
    for (auto i : bundle.ground_truth) {
        truth.rows.push_back({std::to_string(i), bundle.abundance.taxon_labels[i],
                              format_number(bundle.expected_r, significant_digits)});
    }
    write_table(dir / "ground_truth.csv", truth);
}

} // namespace coresp
