#include "coresp/ingest.hpp"

#include "coresp/error.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace coresp {

namespace {

void require_unique(const std::vector<std::string>& labels, const char* what) {
    std::set<std::string> seen;
    std::vector<std::string> dups;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) dups.push_back(l);
    }
    if (!dups.empty()) throw ValidationError(fmt::format("duplicate {}: {}", what, fmt::join(dups, ", ")));
}

} // namespace

void AbundanceMatrix::validate() const {
    if (sample_ids.size() != n_samples()) throw ValidationError("sample id count does not match matrix rows");
    if (taxon_labels.size() != n_taxa()) throw ValidationError("taxon label count does not match matrix columns");
    require_unique(sample_ids, "sample ids");
    require_unique(taxon_labels, "taxon labels");
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double v = values(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError(fmt::format("abundance for sample '{}', taxon '{}' is {} (must be finite and >= 0)",
                                                  sample_ids[i], taxon_labels[j], v));
            }
        }
    }
}

void FunctionalVariable::validate() const {
    if (!sample_ids.empty() && sample_ids.size() != size()) throw ValidationError("functional variable id count mismatch");
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ValidationError("functional variable has non-finite entries");
    }
    if (size() < 2 || (values.array() - values.mean()).square().sum() <= 0.0) {
        throw ValidationError(fmt::format("functional variable '{}' has zero variance", name));
    }
}

AbundanceMatrix load_abundance(const std::filesystem::path& path, Orientation orientation) {
    const TextTable table = read_table(path);
    const std::string source = path.string();
    if (table.header.size() < 2) throw ParseError(fmt::format("{}: need a label column and at least one data column", source));

    const std::size_t rows = table.rows.size();
    const std::size_t cols = table.header.size() - 1;
    Eigen::MatrixXd raw(rows, cols);
    std::vector<std::string> row_labels;
    row_labels.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        row_labels.push_back(table.rows[i][0]);
        for (std::size_t j = 0; j < cols; ++j) {
            raw(i, j) = parse_number(table.rows[i][j + 1], i + 2, j + 2, source);
        }
    }
    std::vector<std::string> col_labels(table.header.begin() + 1, table.header.end());

    AbundanceMatrix m;
    if (orientation == Orientation::samples_as_rows) {
        m.values = std::move(raw);
        m.sample_ids = std::move(row_labels);
        m.taxon_labels = std::move(col_labels);
    } else {
        m.values = raw.transpose();
        m.sample_ids = std::move(col_labels);
        m.taxon_labels = std::move(row_labels);
    }
    m.validate();
    return m;
}

void write_abundance(const std::filesystem::path& path, const AbundanceMatrix& m, int significant_digits) {
    TextTable table;
    table.header.reserve(m.n_taxa() + 1);
    table.header.push_back("sample_id");
    table.header.insert(table.header.end(), m.taxon_labels.begin(), m.taxon_labels.end());
    for (std::size_t i = 0; i < m.n_samples(); ++i) {
        std::vector<std::string> row;
        row.reserve(m.n_taxa() + 1);
        row.push_back(m.sample_ids[i]);
        for (std::size_t j = 0; j < m.n_taxa(); ++j) row.push_back(format_number(m.values(i, j), significant_digits));
        table.rows.push_back(std::move(row));
    }
    write_table(path, table);
}

FunctionalVariable load_functional(const std::filesystem::path& path, const std::vector<std::string>& sample_ids) {
    const TextTable table = read_table(path);
    const std::string source = path.string();
    if (table.header.size() != 2) throw ParseError(fmt::format("{}: expected two columns (sample_id, value)", source));

    std::unordered_map<std::string, double> by_id;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& id = table.rows[i][0];
        if (!by_id.emplace(id, parse_number(table.rows[i][1], i + 2, 2, source)).second) {
            throw ValidationError(fmt::format("{}: duplicate sample id '{}'", source, id));
        }
    }

    FunctionalVariable y;
    y.name = table.header[1];
    y.sample_ids = sample_ids;
    y.values.resize(static_cast<Eigen::Index>(sample_ids.size()));
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        auto it = by_id.find(sample_ids[i]);
        if (it == by_id.end()) {
            missing.push_back(sample_ids[i]);
        } else {
            y.values[static_cast<Eigen::Index>(i)] = it->second;
            by_id.erase(it);
        }
    }
    if (!missing.empty() || !by_id.empty()) {
        std::vector<std::string> extra;
        for (const auto& row : table.rows) {
            if (by_id.count(row[0])) extra.push_back(row[0]);
        }
        throw ValidationError(fmt::format("{}: unmatched sample ids; missing from function table: [{}]; "
                                          "absent from abundance table: [{}]",
                                          source, fmt::join(missing, ", "), fmt::join(extra, ", ")));
    }
    y.validate();
    return y;
}

void write_functional(const std::filesystem::path& path, const FunctionalVariable& y, int significant_digits) {
    TextTable table;
    table.header = {"sample_id", y.name.empty() ? std::string("value") : y.name};
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::string id = i < y.sample_ids.size() ? y.sample_ids[i] : fmt::format("s{}", i + 1);
        table.rows.push_back({id, format_number(y.values[static_cast<Eigen::Index>(i)], significant_digits)});
    }
    write_table(path, table);
}

AbundanceMatrix filter_sparse_taxa(const AbundanceMatrix& m, double max_zero_fraction) {
    if (!(max_zero_fraction >= 0.0 && max_zero_fraction <= 1.0)) {
        throw ValidationError("max_zero_fraction must lie in [0, 1]");
    }
    const auto n = static_cast<double>(m.n_samples());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
        const auto zeros = static_cast<double>((m.values.col(j).array() == 0.0).count());
        if (!(zeros / n > max_zero_fraction)) keep.push_back(j);
    }
    if (keep.empty()) throw ValidationError("no taxa remain after sparsity filtering");

    AbundanceMatrix out;
    out.sample_ids = m.sample_ids;
    out.values.resize(m.values.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(keep[k]);
        out.taxon_labels.push_back(m.taxon_labels[static_cast<std::size_t>(keep[k])]);
    }
    return out;
}

double quantile_linear(std::vector<double> values, double prob) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
}

AbundanceMatrix css_normalize(const AbundanceMatrix& m, const CssOptions& options) {
    if (!(options.quantile > 0.0 && options.quantile < 1.0)) throw ValidationError("CSS quantile must lie in (0, 1)");
    if (!(options.scale > 0.0)) throw ValidationError("CSS scale must be positive");

    AbundanceMatrix out = m;
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        std::vector<double> nonzero;
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            if (m.values(i, j) != 0.0) nonzero.push_back(m.values(i, j));
        }
        const auto& sample = m.sample_ids[static_cast<std::size_t>(i)];
        if (nonzero.empty()) throw ValidationError(fmt::format("CSS: sample '{}' has no nonzero abundance", sample));
        const double q = quantile_linear(nonzero, options.quantile);
        double s = 0.0;
        for (double v : nonzero) {
            if (v <= q) s += v;
        }
        if (!(s > 0.0)) throw NumericError(fmt::format("CSS: scaling factor is zero for sample '{}'", sample));
        out.values.row(i) = m.values.row(i) / s * options.scale;
    }
    return out;
}

} // namespace coresp
