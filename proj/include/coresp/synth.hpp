#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "coresp/ingest.hpp"
#include "coresp/network.hpp"

namespace coresp {

/// Synthetic community with block-structured co-occurrence and a planted
/// functional group. Taxon j belongs to block floor(j * n_blocks / n_taxa).
struct SynthSpec {
    std::size_t n_samples = 100;
    std::size_t n_taxa = 60;
    std::size_t n_blocks = 4;
    double intra_block_weight = 0.1;
    double inter_block_weight = 0.01;
    std::vector<std::size_t> planted_group;
    /// Noise standard deviation as a fraction of the signal's standard deviation.
    double noise_sigma = 0.05;
    /// Log-normal abundance parameters (of the underlying normal).
    double log_mean = 2.0;
    double log_sd = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthBundle {
    AbundanceMatrix abundance;  ///< CSS-normalized
    CoOccurrenceNetwork network;
    FunctionalVariable function;
    std::vector<std::size_t> ground_truth;
    /// Population correlation of the planted group, 1 / sqrt(1 + noise_sigma^2).
    double expected_r = 1.0;
};

/// Abundances are drawn log-normal and CSS-normalized; y is the summed
/// convolved abundance of the planted group plus Gaussian noise with standard
/// deviation noise_sigma * sd(signal). Bit-identical for a given seed.
SynthBundle generate(const SynthSpec& spec);

/// `size` distinct taxa drawn uniformly with the given seed, sorted.
std::vector<std::size_t> random_group(std::size_t n_taxa, std::size_t size, std::uint64_t seed);

/// Writes abundance.csv, function.csv, adjacency.csv and ground_truth.csv into `dir`.
void write_bundle(const std::filesystem::path& dir, const SynthBundle& bundle, int significant_digits = 0);

} // namespace coresp
