#include "coresp/network.hpp"

#include "coresp/error.hpp"
#include "coresp/parallel.hpp"
#include "coresp/stats.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace coresp {

void CoOccurrenceNetwork::validate() const {
    if (adjacency.rows() != adjacency.cols()) throw ValidationError("adjacency matrix is not square");
    if (taxon_labels.size() != size()) throw ValidationError("adjacency label count does not match matrix size");
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
        if (adjacency(i, i) != 0.0) throw ValidationError("adjacency has a self-loop");
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
            const double w = adjacency(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw ValidationError(fmt::format("edge weight ({}, {}) = {} must be finite and >= 0",
                                                  taxon_labels[i], taxon_labels[j], w));
            }
            if (std::abs(w - adjacency(j, i)) > 1e-12) throw ValidationError("adjacency is not symmetric");
        }
    }
}

CoOccurrenceNetwork CoOccurrenceNetwork::empty_graph(std::vector<std::string> labels) {
    const auto p = static_cast<Eigen::Index>(labels.size());
    return {Eigen::MatrixXd::Zero(p, p), std::move(labels)};
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::unordered_map<std::string, Eigen::Index> index_labels(const std::vector<std::string>& labels) {
    std::unordered_map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<Eigen::Index>(i));
    return index;
}

void check_weight(double w, const std::string& a, const std::string& b) {
    if (w < 0.0) throw ValidationError(fmt::format("negative edge weight {} between '{}' and '{}'", w, a, b));
}

} // namespace

AdjacencyLoad load_adjacency(const std::filesystem::path& path, const std::vector<std::string>& labels) {
    const TextTable table = read_table(path);
    const std::string source = path.string();
    const auto p = static_cast<Eigen::Index>(labels.size());
    const auto index = index_labels(labels);

    AdjacencyLoad out;
    out.network.taxon_labels = labels;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);

    const bool edge_list = table.header.size() == 3 && lower(table.header[0]) == "source" &&
                           lower(table.header[1]) == "target" && lower(table.header[2]) == "weight";
    if (edge_list) {
        std::vector<std::string> unknown;
        std::map<std::pair<Eigen::Index, Eigen::Index>, double> seen;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const double w = parse_number(row[2], r + 2, 3, source);
            auto si = index.find(row[0]);
            auto ti = index.find(row[1]);
            if (si == index.end()) unknown.push_back(row[0]);
            if (ti == index.end()) unknown.push_back(row[1]);
            if (si == index.end() || ti == index.end()) continue;
            check_weight(w, row[0], row[1]);
            if (si->second == ti->second) {
                out.warnings.push_back(fmt::format("self-loop on '{}' ignored", row[0]));
                continue;
            }
            const auto key = std::minmax(si->second, ti->second);
            auto [it, inserted] = seen.emplace(key, w);
            if (!inserted && it->second != w) {
                throw ValidationError(fmt::format("{}: conflicting weights for edge '{}'-'{}'", source, row[0], row[1]));
            }
            a(si->second, ti->second) = w;
            a(ti->second, si->second) = w;
        }
        if (!unknown.empty()) {
            std::sort(unknown.begin(), unknown.end());
            unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
            throw ValidationError(fmt::format("{}: taxa not in the abundance table: {}", source, fmt::join(unknown, ", ")));
        }
    } else {
        std::vector<std::string> file_labels(table.header.begin() + 1, table.header.end());
        if (table.rows.size() != file_labels.size()) {
            throw ParseError(fmt::format("{}: adjacency matrix has {} rows and {} columns", source, table.rows.size(),
                                         file_labels.size()));
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (table.rows[r][0] != file_labels[r]) {
                throw ParseError(fmt::format("{}: row {} label '{}' does not match column label '{}'", source, r + 2,
                                             table.rows[r][0], file_labels[r]));
            }
        }
        std::vector<std::string> extra;
        std::vector<Eigen::Index> target(file_labels.size(), -1);
        std::vector<bool> covered(labels.size(), false);
        for (std::size_t k = 0; k < file_labels.size(); ++k) {
            auto it = index.find(file_labels[k]);
            if (it == index.end()) {
                extra.push_back(file_labels[k]);
            } else {
                target[k] = it->second;
                covered[static_cast<std::size_t>(it->second)] = true;
            }
        }
        std::vector<std::string> missing;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (!covered[i]) missing.push_back(labels[i]);
        }
        if (!extra.empty() || !missing.empty()) {
            throw ValidationError(fmt::format("{}: label mismatch; not in abundance table: [{}]; missing from "
                                              "adjacency: [{}]",
                                              source, fmt::join(extra, ", "), fmt::join(missing, ", ")));
        }
        for (std::size_t r = 0; r < file_labels.size(); ++r) {
            for (std::size_t c = 0; c < file_labels.size(); ++c) {
                const double w = parse_number(table.rows[r][c + 1], r + 2, c + 2, source);
                check_weight(w, file_labels[r], file_labels[c]);
                a(target[r], target[c]) = w;
            }
        }
        if (a.diagonal().cwiseAbs().maxCoeff() > 0.0) {
            out.warnings.push_back("nonzero diagonal (self-loops) set to zero");
            a.diagonal().setZero();
        }
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0) {
            out.warnings.push_back("asymmetric adjacency symmetrized as (A + A^T) / 2");
            const Eigen::MatrixXd sym = (a + a.transpose()) / 2.0;
            a = sym;
        }
    }
    out.network.adjacency = std::move(a);
    out.network.validate();
    return out;
}

void write_adjacency(const std::filesystem::path& path, const CoOccurrenceNetwork& net, int significant_digits) {
    TextTable table;
    table.header.push_back("taxon");
    table.header.insert(table.header.end(), net.taxon_labels.begin(), net.taxon_labels.end());
    for (std::size_t i = 0; i < net.size(); ++i) {
        std::vector<std::string> row{net.taxon_labels[i]};
        for (std::size_t j = 0; j < net.size(); ++j) {
            row.push_back(format_number(net.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                        significant_digits));
        }
        table.rows.push_back(std::move(row));
    }
    write_table(path, table);
}

void write_edge_list(const std::filesystem::path& path, const CoOccurrenceNetwork& net, double threshold,
                     int significant_digits) {
    TextTable table;
    table.header = {"source", "target", "weight"};
    for (Eigen::Index i = 0; i < net.adjacency.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < net.adjacency.cols(); ++j) {
            const double w = net.adjacency(i, j);
            if (w > threshold) {
                table.rows.push_back({net.taxon_labels[static_cast<std::size_t>(i)],
                                      net.taxon_labels[static_cast<std::size_t>(j)],
                                      format_number(w, significant_digits)});
            }
        }
    }
    write_table(path, table);
}

CoOccurrenceNetwork infer_network(const AbundanceMatrix& m, const NetworkInferenceConfig& cfg) {
    const Eigen::Index n = m.values.rows();
    const Eigen::Index p = m.values.cols();
    if (p < 2) throw ValidationError("network inference needs at least two taxa");
    if (n < 2) throw ValidationError("network inference needs at least two samples");
    if (cfg.mu1 < 0.0 || cfg.mu2 < 0.0) throw ValidationError("network penalties must be non-negative");
    if (cfg.max_iterations <= 0 || !(cfg.tolerance > 0.0)) throw ValidationError("invalid convergence settings");

    // Standardize: zero mean, unit (1/n) variance. Constant columns stay zero
    // and never enter any regression.
    Eigen::MatrixXd z = center_columns(m.values);
    std::vector<bool> active(static_cast<std::size_t>(p), true);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n));
        if (sd > 0.0) {
            z.col(j) /= sd;
        } else {
            z.col(j).setZero();
            active[static_cast<std::size_t>(j)] = false;
        }
    }
    const Eigen::MatrixXd gram = z.transpose() * z / static_cast<double>(n);

    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(p, p);
    std::vector<double> worst_change(static_cast<std::size_t>(p), 0.0);
    std::vector<bool> converged(static_cast<std::size_t>(p), true);

    // Coordinate descent in covariance form: with G = Z^T Z / n the partial
    // gradient for coordinate k of target j is G(k, j) - sum_l G(k, l) b_l.
    parallel_for(static_cast<std::size_t>(p), cfg.threads, [&](std::size_t jj) {
        const auto j = static_cast<Eigen::Index>(jj);
        if (!active[jj]) return;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd gb = Eigen::VectorXd::Zero(p);  // G * b
        double change = 0.0;
        bool done = false;
        for (int iter = 0; iter < cfg.max_iterations; ++iter) {
            change = 0.0;
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j || !active[static_cast<std::size_t>(k)]) continue;
                const double gkk = gram(k, k);
                const double rho = gram(k, j) - (gb[k] - gkk * b[k]);
                const double updated = std::max(0.0, rho - cfg.mu1) / (gkk + cfg.mu2);
                const double delta = updated - b[k];
                if (delta != 0.0) {
                    gb += delta * gram.col(k);
                    b[k] = updated;
                    change = std::max(change, std::abs(delta));
                }
            }
            if (change < cfg.tolerance) {
                done = true;
                break;
            }
        }
        coef.col(j) = b;
        worst_change[jj] = change;
        converged[jj] = done;
    });

    Eigen::Index worst = -1;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!converged[static_cast<std::size_t>(j)] &&
            (worst < 0 || worst_change[static_cast<std::size_t>(j)] > worst_change[static_cast<std::size_t>(worst)])) {
            worst = j;
        }
    }
    if (worst >= 0) {
        throw NumericError(fmt::format("network inference did not converge in {} iterations; worst column '{}' "
                                       "last coefficient change {}",
                                       cfg.max_iterations, m.taxon_labels[static_cast<std::size_t>(worst)],
                                       worst_change[static_cast<std::size_t>(worst)]));
    }

    // coef(k, j) is the weight of taxon k in the regression for taxon j.
    Eigen::MatrixXd sym = (coef + coef.transpose()) / 2.0;
    sym.diagonal().setZero();
    return {std::move(sym), m.taxon_labels};
}

Eigen::MatrixXd convolution_operator(const Eigen::MatrixXd& adjacency) {
    const Eigen::Index p = adjacency.rows();
    Eigen::MatrixXd aug = adjacency + Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd inv_sqrt_degree = aug.rowwise().sum().array().sqrt().inverse();
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) aug(i, j) *= inv_sqrt_degree[i] * inv_sqrt_degree[j];
    }
    return aug;
}

TopologicalAbundance convolve_rows(const Eigen::MatrixXd& abundance, const Eigen::MatrixXd& op) {
    if (abundance.cols() != op.rows() || op.rows() != op.cols()) {
        throw ValidationError(fmt::format("convolution dimension mismatch: {} taxa vs {}x{} operator",
                                          abundance.cols(), op.rows(), op.cols()));
    }
    TopologicalAbundance out;
    out.values = abundance * op;
    out.centered = center_columns(out.values);
    return out;
}

TopologicalAbundance convolve(const AbundanceMatrix& m, const CoOccurrenceNetwork& net) {
    if (net.size() != m.n_taxa()) {
        throw ValidationError(fmt::format("network has {} taxa, abundance table has {}", net.size(), m.n_taxa()));
    }
    if (!net.taxon_labels.empty() && net.taxon_labels != m.taxon_labels) {
        throw ValidationError("network taxon labels do not match the abundance table order");
    }
    return convolve_rows(m.values, convolution_operator(net.adjacency));
}

} // namespace coresp
