#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace coresp {

/// Binary taxon-membership vector; bit i set means taxon i is in the group.
/// Ordering is lexicographic over the bit string (0 < 1), used for tie-breaks.
class GroupChromosome {
public:
    GroupChromosome() = default;
    explicit GroupChromosome(std::size_t length) : bits_(length, 0) {}

    static GroupChromosome from_indices(std::size_t length, const std::vector<std::size_t>& indices);
    /// Parses a string of '0'/'1' characters.
    static GroupChromosome from_string(std::string_view text);

    std::size_t size() const { return bits_.size(); }
    std::size_t count() const;
    bool test(std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
    void flip(std::size_t i) { bits_[i] ^= 1; }

    std::vector<std::size_t> indices() const;
    std::string to_string() const;
    Eigen::VectorXd as_vector() const;

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }

    auto operator<=>(const GroupChromosome&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

enum class PenaltyMode { size_cap, l1 };

PenaltyMode parse_penalty_mode(std::string_view text);
std::string_view to_string(PenaltyMode mode);

struct OptimizerConfig {
    PenaltyMode mode = PenaltyMode::size_cap;
    int k_opt = 10;
    /// Size-cap penalty per taxon over k_opt; also the magnitude of the
    /// sentinel fitness assigned to degenerate groups.
    double alpha = default_alpha();
    double mu = 1.0 / 30.0;
    int population_size = 200;
    double crossover_prob = 0.8;
    double mutation_prob = 0.1;
    int max_generations = 500;
    int stagnation_limit = 50;
    double elite_fraction = 0.05;
    /// Stop as soon as the best fitness reaches this value.
    std::optional<double> fitness_target;
    std::uint64_t seed = 1;
    /// Worker threads for fitness evaluation; never changes results.
    int threads = 1;

    static double default_alpha() { return std::sqrt(std::numeric_limits<double>::max()); }
    void validate() const;
};

struct FitnessEvaluation {
    double raw_objective = 0.0;     ///< x'M0'y0 / sqrt(x'M0'M0x)
    double pearson_r = 0.0;         ///< raw_objective / ||y0||
    double penalized_fitness = 0.0;
    std::size_t group_size = 0;
    bool degenerate = false;        ///< empty group or zero-variance co-response effect
};

/// Variance threshold below which x'M0'M0x counts as zero.
inline constexpr double degenerate_variance = 1e-15;

/// Evaluates a chromosome from its co-response effect s0 = M0 x. Inputs must be
/// column-centered (M0) and centered (y0).
FitnessEvaluation evaluate_fitness(const GroupChromosome& x, const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0,
                                   const OptimizerConfig& cfg);

/// Fast evaluator for the GA loop, working from the precomputed Gram matrix
/// M0'M0 and the vector M0'y0.
class FitnessKernel {
public:
    FitnessKernel(const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0, const OptimizerConfig& cfg);

    FitnessEvaluation operator()(const GroupChromosome& x) const;

    std::size_t n_taxa() const { return static_cast<std::size_t>(cross_.size()); }
    double y_norm() const { return y_norm_; }

private:
    Eigen::MatrixXd gram_;
    Eigen::VectorXd cross_;
    double y_norm_ = 0.0;
    PenaltyMode mode_;
    int k_opt_;
    double alpha_;
    double mu_;
};

struct GenerationStats {
    int generation = 0;
    double max_fitness = 0.0;
    double mean_fitness = 0.0;
    double max_r = 0.0;
    double mean_r = 0.0;
    double mean_size = 0.0;
    std::uint64_t population_digest = 0;  ///< FNV-1a over every chromosome, in order
};

struct GaResult {
    GroupChromosome best;
    FitnessEvaluation best_eval;
    std::vector<GenerationStats> history;
};

/// Genetic search over groups. Deterministic given cfg.seed, for any thread
/// count. The returned group is the best ever seen; in size_cap mode only
/// groups of size <= k_opt are eligible.
GaResult run_ga(const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0, const OptimizerConfig& cfg);

/// generation, max_fitness, mean_fitness, max_r, mean_r, mean_size
void write_history(const std::filesystem::path& path, const std::vector<GenerationStats>& history,
                   int significant_digits);

} // namespace coresp
