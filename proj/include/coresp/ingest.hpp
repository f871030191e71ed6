#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coresp {

/// Sample-by-taxon abundance table (n samples as rows, p taxa as columns).
struct AbundanceMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> sample_ids;
    std::vector<std::string> taxon_labels;

    std::size_t n_samples() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_taxa() const { return static_cast<std::size_t>(values.cols()); }

    /// Throws ValidationError on negative/non-finite entries, duplicate or
    /// miscounted labels.
    void validate() const;
};

/// Per-sample measurement of the soil function, aligned to an abundance table.
struct FunctionalVariable {
    Eigen::VectorXd values;
    std::string name;
    std::vector<std::string> sample_ids;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }

    /// Throws ValidationError on non-finite values, length mismatch or zero variance.
    void validate() const;
};

enum class Orientation { samples_as_rows, taxa_as_rows };

/// Loads a labeled table (header row + leading label column) and returns it in
/// samples x taxa orientation.
AbundanceMatrix load_abundance(const std::filesystem::path& path, Orientation orientation = Orientation::samples_as_rows);

/// Writes samples as rows. `significant_digits == 0` writes the shortest
/// exact representation so that load/write/load is lossless.
void write_abundance(const std::filesystem::path& path, const AbundanceMatrix& m, int significant_digits = 0);

/// Reads a two-column (sample_id, value) table and joins it to `sample_ids`.
/// Ids present on only one side are reported together in a ValidationError.
FunctionalVariable load_functional(const std::filesystem::path& path, const std::vector<std::string>& sample_ids);

void write_functional(const std::filesystem::path& path, const FunctionalVariable& y, int significant_digits = 0);

/// Drops every taxon whose fraction of zero entries is strictly greater than
/// `max_zero_fraction`. Column order is otherwise preserved.
AbundanceMatrix filter_sparse_taxa(const AbundanceMatrix& m, double max_zero_fraction = 0.80);

struct CssOptions {
    double quantile = 0.50;
    double scale = 1000.0;
};

/// Cumulative-sum scaling. For each sample, q is the `quantile` quantile
/// (linear interpolation between order statistics) of the nonzero entries,
/// s is the sum of entries <= q, and the row is replaced by row / s * scale.
AbundanceMatrix css_normalize(const AbundanceMatrix& m, const CssOptions& options = {});

/// Interpolated quantile of a sample (type-7: h = (n - 1) * prob).
double quantile_linear(std::vector<double> values, double prob);

} // namespace coresp
