#include "coresp/ga.hpp"

#include "coresp/error.hpp"
#include "coresp/parallel.hpp"
#include "coresp/random.hpp"
#include "coresp/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace coresp {

GroupChromosome GroupChromosome::from_indices(std::size_t length, const std::vector<std::size_t>& indices) {
    GroupChromosome x(length);
    for (auto i : indices) {
        if (i >= length) throw ValidationError(fmt::format("group index {} out of range for {} taxa", i, length));
        x.set(i);
    }
    return x;
}

GroupChromosome GroupChromosome::from_string(std::string_view text) {
    GroupChromosome x(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') throw ParseError(fmt::format("invalid bit '{}' in group string", text[i]));
        x.set(i, text[i] == '1');
    }
    return x;
}

std::size_t GroupChromosome::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> GroupChromosome::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

std::string GroupChromosome::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) s[i] = '1';
    }
    return s;
}

Eigen::VectorXd GroupChromosome::as_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(bits_.size()));
    for (std::size_t i = 0; i < bits_.size(); ++i) v[static_cast<Eigen::Index>(i)] = bits_[i];
    return v;
}

PenaltyMode parse_penalty_mode(std::string_view text) {
    if (text == "size_cap" || text == "size-cap") return PenaltyMode::size_cap;
    if (text == "l1") return PenaltyMode::l1;
    throw ValidationError(fmt::format("unknown penalty mode '{}' (expected size_cap or l1)", text));
}

std::string_view to_string(PenaltyMode mode) { return mode == PenaltyMode::size_cap ? "size_cap" : "l1"; }

void OptimizerConfig::validate() const {
    auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (mode == PenaltyMode::size_cap && k_opt < 1) throw ValidationError("k_opt must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be positive and finite");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be non-negative");
    if (population_size < 2) throw ValidationError("population size must be at least 2");
    if (!prob(crossover_prob) || !prob(mutation_prob)) throw ValidationError("GA probabilities must lie in [0, 1]");
    if (max_generations < 1 || stagnation_limit < 1) throw ValidationError("generation limits must be positive");
    if (!prob(elite_fraction)) throw ValidationError("elite fraction must lie in [0, 1]");
}

FitnessEvaluation evaluate_fitness(const GroupChromosome& x, const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0,
                                   const OptimizerConfig& cfg) {
    if (x.size() != static_cast<std::size_t>(m0.cols())) throw ValidationError("chromosome length does not match taxa");
    if (y0.size() != m0.rows()) throw ValidationError("functional variable length does not match samples");

    FitnessEvaluation e;
    e.group_size = x.count();
    const Eigen::VectorXd s0 = m0 * x.as_vector();
    const double ss = s0.squaredNorm();
    if (e.group_size == 0 || ss <= degenerate_variance) {
        e.degenerate = true;
        e.penalized_fitness = -cfg.alpha;
        return e;
    }
    e.raw_objective = s0.dot(y0) / std::sqrt(ss);
    const double y_norm = y0.norm();
    e.pearson_r = y_norm > 0.0 ? e.raw_objective / y_norm : 0.0;
    const auto size = static_cast<double>(e.group_size);
    e.penalized_fitness = cfg.mode == PenaltyMode::size_cap
                              ? e.raw_objective - cfg.alpha * std::max(size - cfg.k_opt, 0.0)
                              : e.raw_objective - cfg.mu * size;
    return e;
}

FitnessKernel::FitnessKernel(const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0, const OptimizerConfig& cfg)
    : gram_(m0.transpose() * m0), cross_(m0.transpose() * y0), y_norm_(y0.norm()), mode_(cfg.mode),
      k_opt_(cfg.k_opt), alpha_(cfg.alpha), mu_(cfg.mu) {
    if (y0.size() != m0.rows()) throw ValidationError("functional variable length does not match samples");
    if (!(y_norm_ > 0.0)) throw ValidationError("functional variable has zero variance");
}

FitnessEvaluation FitnessKernel::operator()(const GroupChromosome& x) const {
    const auto& bits = x.bits();
    const auto p = static_cast<Eigen::Index>(bits.size());
    thread_local std::vector<Eigen::Index> members;
    members.clear();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (bits[static_cast<std::size_t>(i)]) members.push_back(i);
    }
    const std::size_t k = members.size();

    FitnessEvaluation e;
    e.group_size = k;
    double cross = 0.0;
    double quad = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        const Eigen::Index i = members[a];
        cross += cross_[i];
        const double* col = gram_.col(i).data();
        double partial = 0.0;
        for (std::size_t b = 0; b < k; ++b) partial += col[members[b]];
        quad += partial;
    }
    if (k == 0 || quad <= degenerate_variance) {
        e.degenerate = true;
        e.penalized_fitness = -alpha_;
        return e;
    }
    e.raw_objective = cross / std::sqrt(quad);
    e.pearson_r = e.raw_objective / y_norm_;
    const auto size = static_cast<double>(k);
    e.penalized_fitness = mode_ == PenaltyMode::size_cap ? e.raw_objective - alpha_ * std::max(size - k_opt_, 0.0)
                                                         : e.raw_objective - mu_ * size;
    return e;
}

namespace {

std::uint64_t digest(const std::vector<GroupChromosome>& population) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& x : population) {
        for (auto b : x.bits()) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<GroupChromosome> initial_population(std::size_t p, const OptimizerConfig& cfg, Xoshiro256& rng) {
    std::vector<GroupChromosome> pop;
    pop.reserve(static_cast<std::size_t>(cfg.population_size));
    std::vector<std::size_t> order(p);
    for (int i = 0; i < cfg.population_size; ++i) {
        GroupChromosome x(p);
        if (cfg.mode == PenaltyMode::size_cap) {
            const std::size_t k = std::min(static_cast<std::size_t>(cfg.k_opt), p);
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t j = 0; j < k; ++j) {
                std::swap(order[j], order[j + rng.below(p - j)]);
                x.set(order[j]);
            }
        } else {
            const double density = std::min(0.5, 25.0 / static_cast<double>(p));
            for (std::size_t j = 0; j < p; ++j) x.set(j, rng.bernoulli(density));
        }
        pop.push_back(std::move(x));
    }
    return pop;
}

bool eligible(const FitnessEvaluation& e, const OptimizerConfig& cfg) {
    if (e.degenerate) return false;
    return cfg.mode != PenaltyMode::size_cap || e.group_size <= static_cast<std::size_t>(cfg.k_opt);
}

std::vector<GroupChromosome> next_generation(const std::vector<GroupChromosome>& pop,
                                             const std::vector<FitnessEvaluation>& evals, const OptimizerConfig& cfg,
                                             Xoshiro256& rng) {
    const std::size_t size = pop.size();
    const std::size_t p = pop.front().size();
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = evals[a].penalized_fitness;
        const double fb = evals[b].penalized_fitness;
        if (fa != fb) return fa > fb;
        if (pop[a] != pop[b]) return pop[a] < pop[b];
        return a < b;
    });

    std::vector<GroupChromosome> next;
    next.reserve(size);
    const auto elites = std::min(size, static_cast<std::size_t>(std::ceil(cfg.elite_fraction * static_cast<double>(size))));
    for (std::size_t i = 0; i < elites; ++i) next.push_back(pop[order[i]]);

    // Linear rank selection: the individual at rank r (0 = best) has weight size - r.
    std::vector<std::uint64_t> cumulative(size);
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < size; ++r) {
        total += size - r;
        cumulative[r] = total;
    }
    auto select = [&]() -> const GroupChromosome& {
        const std::uint64_t ticket = rng.below(total);
        const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), ticket) - cumulative.begin();
        return pop[order[static_cast<std::size_t>(pos)]];
    };
    auto mutate = [&](GroupChromosome& x) {
        if (rng.bernoulli(cfg.mutation_prob)) x.flip(rng.below(p));
    };

    while (next.size() < size) {
        GroupChromosome a = select();
        GroupChromosome b = select();
        if (p > 1 && rng.bernoulli(cfg.crossover_prob)) {
            const std::size_t cut = 1 + rng.below(p - 1);
            std::swap_ranges(a.bits().begin() + static_cast<std::ptrdiff_t>(cut), a.bits().end(),
                             b.bits().begin() + static_cast<std::ptrdiff_t>(cut));
        }
        mutate(a);
        mutate(b);
        next.push_back(std::move(a));
        if (next.size() < size) next.push_back(std::move(b));
    }
    return next;
}

} // namespace

GaResult run_ga(const Eigen::MatrixXd& m0, const Eigen::VectorXd& y0, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto p = static_cast<std::size_t>(m0.cols());
    if (p < 2) throw ValidationError("genetic search needs at least two taxa");
    const FitnessKernel kernel(m0, y0, cfg);

    Xoshiro256 init_rng(derive_seed(cfg.seed, {0}));
    std::vector<GroupChromosome> pop = initial_population(p, cfg, init_rng);
    std::vector<FitnessEvaluation> evals(pop.size());

    GaResult result;
    bool have_best = false;
    int since_improvement = 0;
    for (int gen = 0;; ++gen) {
        parallel_for(pop.size(), cfg.threads, [&](std::size_t i) { evals[i] = kernel(pop[i]); });

        GenerationStats stats;
        stats.generation = gen;
        stats.max_fitness = -std::numeric_limits<double>::infinity();
        stats.max_r = -std::numeric_limits<double>::infinity();
        bool improved = false;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const auto& e = evals[i];
            stats.max_fitness = std::max(stats.max_fitness, e.penalized_fitness);
            stats.max_r = std::max(stats.max_r, e.pearson_r);
            stats.mean_fitness += e.penalized_fitness;
            stats.mean_r += e.pearson_r;
            stats.mean_size += static_cast<double>(e.group_size);
            if (!eligible(e, cfg)) continue;
            const double best_f = result.best_eval.penalized_fitness;
            if (!have_best || e.penalized_fitness > best_f ||
                (e.penalized_fitness == best_f && pop[i] < result.best)) {
                if (!have_best || e.penalized_fitness > best_f) improved = true;
                result.best = pop[i];
                result.best_eval = e;
                have_best = true;
            }
        }
        const auto count = static_cast<double>(pop.size());
        stats.mean_fitness /= count;
        stats.mean_r /= count;
        stats.mean_size /= count;
        stats.population_digest = digest(pop);
        result.history.push_back(stats);

        since_improvement = improved ? 0 : since_improvement + 1;
        if (gen + 1 >= cfg.max_generations || since_improvement >= cfg.stagnation_limit) break;
        if (have_best && cfg.fitness_target && result.best_eval.penalized_fitness >= *cfg.fitness_target) break;

        Xoshiro256 rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(gen) + 1}));
        pop = next_generation(pop, evals, cfg, rng);
    }
    if (!have_best) throw NumericError("genetic search found no non-degenerate feasible group");
    return result;
}

void write_history(const std::filesystem::path& path, const std::vector<GenerationStats>& history,
                   int significant_digits) {
    TextTable table;
    table.header = {"generation", "max_fitness", "mean_fitness", "max_r", "mean_r", "mean_size"};
    for (const auto& h : history) {
        table.rows.push_back({std::to_string(h.generation), format_number(h.max_fitness, significant_digits),
                              format_number(h.mean_fitness, significant_digits),
                              format_number(h.max_r, significant_digits), format_number(h.mean_r, significant_digits),
                              format_number(h.mean_size, significant_digits)});
    }
    write_table(path, table);
}

} // namespace coresp
