#include "doctest.h"

#include <algorithm>

#include "coresp/error.hpp"
#include "coresp/ga.hpp"
#include "coresp/random.hpp"
#include "coresp/stats.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coresp;

namespace {

struct Problem {
    Eigen::MatrixXd m;
    Eigen::VectorXd y;
};

// y is a noisy sum of the planted columns of a random positive matrix.
Problem planted(Eigen::Index n, Eigen::Index p, const std::vector<Eigen::Index>& group, std::uint64_t seed,
                double noise = 0.3) {
    Problem pr{testutil::random_matrix(n, p, seed, 0.0, 1.0), Eigen::VectorXd::Zero(n)};
    Xoshiro256 rng(seed ^ 0xabcdefULL);
    for (auto j : group) pr.y += pr.m.col(j);
    for (Eigen::Index i = 0; i < n; ++i) pr.y[i] += noise * rng.normal();
    return pr;
}

OptimizerConfig small_config(PenaltyMode mode, int k, std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.mode = mode;
    cfg.k_opt = k;
    cfg.population_size = 60;
    cfg.max_generations = 150;
    cfg.stagnation_limit = 30;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("chromosome helpers") {
    const auto x = GroupChromosome::from_string("0110");
    CHECK(x.count() == 2);
    CHECK(x.indices() == std::vector<std::size_t>{1, 2});
    CHECK(GroupChromosome::from_indices(4, {1, 2}) == x);
    CHECK(x.to_string() == "0110");
    CHECK(GroupChromosome::from_string("0011") < x);
    CHECK_THROWS_AS(GroupChromosome::from_string("01x"), ParseError);
    CHECK_THROWS_AS(GroupChromosome::from_indices(3, {3}), ValidationError);
}

TEST_CASE("penalty mode parsing") {
    CHECK(parse_penalty_mode("l1") == PenaltyMode::l1);
    CHECK(parse_penalty_mode("size_cap") == PenaltyMode::size_cap);
    CHECK_THROWS_AS(parse_penalty_mode("l2"), ValidationError);
}

TEST_CASE("single-taxon fitness is that column's correlation") {
    const auto pr = planted(25, 5, {2}, 4);
    const Eigen::MatrixXd m0 = center_columns(pr.m);
    const Eigen::VectorXd y0 = center(pr.y);
    OptimizerConfig cfg;
    for (std::size_t j = 0; j < 5; ++j) {
        const auto x = GroupChromosome::from_indices(5, {j});
        const auto e = evaluate_fitness(x, m0, y0, cfg);
        const double r = oracle::pearson(oracle::to_std(pr.m.col(static_cast<Eigen::Index>(j))), oracle::to_std(pr.y));
        CHECK(e.pearson_r == doctest::Approx(r).epsilon(1e-12));
        CHECK(e.penalized_fitness == e.raw_objective);
    }
}

TEST_CASE("size-cap penalty applies one alpha per taxon over the cap") {
    const auto pr = planted(20, 6, {0, 1}, 8);
    const Eigen::MatrixXd m0 = center_columns(pr.m);
    const Eigen::VectorXd y0 = center(pr.y);
    OptimizerConfig cfg;
    cfg.k_opt = 2;
    cfg.alpha = 1000.0;
    const auto e = evaluate_fitness(GroupChromosome::from_string("111000"), m0, y0, cfg);
    CHECK(e.penalized_fitness == doctest::Approx(e.raw_objective - 1000.0));
    OptimizerConfig capped;
    capped.k_opt = 2;
    const auto big = evaluate_fitness(GroupChromosome::from_string("111000"), m0, y0, capped);
    CHECK(big.penalized_fitness < -1e150);
}

TEST_CASE("fitness matches the scalar oracle on a 20 x 6 example") {
    const auto pr = planted(20, 6, {0, 3}, 21);
    const Eigen::MatrixXd m0 = center_columns(pr.m);
    const Eigen::VectorXd y0 = center(pr.y);
    const auto x = GroupChromosome::from_string("110100");
    OptimizerConfig cfg;
    const auto direct = evaluate_fitness(x, m0, y0, cfg);
    const FitnessKernel kernel(m0, y0, cfg);
    const auto fast = kernel(x);
    const double expected = oracle::raw_objective(pr.m, pr.y, x);
    CHECK(std::abs(direct.raw_objective - expected) < 1e-10);
    CHECK(std::abs(fast.raw_objective - expected) < 1e-10);
    const double r = oracle::pearson(oracle::group_effect(pr.m, x), oracle::to_std(pr.y));
    CHECK(std::abs(fast.pearson_r - r) < 1e-10);
}

TEST_CASE("degenerate groups get the sentinel fitness") {
    Eigen::MatrixXd m = testutil::random_matrix(10, 3, 2);
    m.col(1).setConstant(4.0);
    const Eigen::MatrixXd m0 = center_columns(m);
    const Eigen::VectorXd y0 = center(testutil::random_matrix(10, 1, 3).col(0));
    OptimizerConfig cfg;
    const FitnessKernel kernel(m0, y0, cfg);
    CHECK(kernel(GroupChromosome(3)).degenerate);
    CHECK(kernel(GroupChromosome::from_string("010")).degenerate);
    CHECK(kernel(GroupChromosome::from_string("010")).penalized_fitness == -cfg.alpha);
    CHECK_FALSE(kernel(GroupChromosome::from_string("110")).degenerate);
}

TEST_CASE("planted singleton is found in l1 mode") {
    Eigen::MatrixXd m = testutil::random_matrix(30, 10, 5);
    const Eigen::VectorXd y = m.col(6);
    auto cfg = small_config(PenaltyMode::l1, 10, 3);
    cfg.mu = 1.0 / 30.0;
    const auto res = run_ga(center_columns(m), center(y), cfg);
    CHECK(res.best.indices() == std::vector<std::size_t>{6});
    CHECK(res.best_eval.pearson_r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("GA reaches the exhaustive optimum on small problems") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pr = planted(40, 12, {1, 5, 9}, seed + 50, 0.8);
        const double best = oracle::brute_force_best(pr.m, pr.y, 3);
        const auto res = run_ga(center_columns(pr.m), center(pr.y), small_config(PenaltyMode::size_cap, 3, seed));
        CHECK(res.best.count() <= 3);
        if (std::abs(res.best_eval.penalized_fitness - best) < 1e-9) ++hits;
    }
    CHECK(hits >= 9);
}

TEST_CASE("GA is deterministic and its best fitness never drops") {
    const auto pr = planted(30, 20, {2, 3, 11}, 77);
    const Eigen::MatrixXd m0 = center_columns(pr.m);
    const Eigen::VectorXd y0 = center(pr.y);
    for (auto mode : {PenaltyMode::size_cap, PenaltyMode::l1}) {
        const auto cfg = small_config(mode, 4, 12);
        const auto a = run_ga(m0, y0, cfg);
        const auto b = run_ga(m0, y0, cfg);
        REQUIRE(a.history.size() == b.history.size());
        for (std::size_t g = 0; g < a.history.size(); ++g) {
            CHECK(a.history[g].population_digest == b.history[g].population_digest);
            CHECK(a.history[g].max_fitness == b.history[g].max_fitness);
            if (g > 0) CHECK(a.history[g].max_fitness >= a.history[g - 1].max_fitness);
        }
        CHECK(a.best == b.best);

        auto threaded = cfg;
        threaded.threads = 3;
        const auto c = run_ga(m0, y0, threaded);
        CHECK(c.best == a.best);
        CHECK(c.history.back().population_digest == a.history.back().population_digest);

        auto other = cfg;
        other.seed = 13;
        CHECK(run_ga(m0, y0, other).history.front().population_digest != a.history.front().population_digest);
    }
}

TEST_CASE("scaling y leaves the size-capped trajectory unchanged") {
    const auto pr = planted(30, 15, {0, 7}, 31);
    const Eigen::MatrixXd m0 = center_columns(pr.m);
    const Eigen::VectorXd y0 = center(pr.y);
    const auto cfg = small_config(PenaltyMode::size_cap, 3, 5);
    const auto a = run_ga(m0, y0, cfg);
    const auto b = run_ga(m0, Eigen::VectorXd(10.0 * y0), cfg);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t g = 0; g < a.history.size(); ++g)
        CHECK(a.history[g].population_digest == b.history[g].population_digest);
    CHECK(a.best == b.best);
    CHECK(a.best_eval.pearson_r == doctest::Approx(b.best_eval.pearson_r).epsilon(1e-12));
}

TEST_CASE("size-capped result is always feasible") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto pr = planted(25, 18, {0, 1, 2, 3, 4, 5, 6, 7}, seed);
        for (int k : {1, 2, 5}) {
            const auto res = run_ga(center_columns(pr.m), center(pr.y), small_config(PenaltyMode::size_cap, k, seed));
            CHECK(res.best.count() <= static_cast<std::size_t>(k));
            CHECK(res.best.count() >= 1);
        }
    }
}

TEST_CASE("stopping rules") {
    const auto pr = planted(20, 8, {1}, 2);
    auto cfg = small_config(PenaltyMode::size_cap, 2, 1);
    cfg.max_generations = 7;
    cfg.stagnation_limit = 1000;
    CHECK(run_ga(center_columns(pr.m), center(pr.y), cfg).history.size() == 7);
    cfg.max_generations = 500;
    cfg.fitness_target = -1e300;
    CHECK(run_ga(center_columns(pr.m), center(pr.y), cfg).history.size() == 1);
}

TEST_CASE("configuration validation") {
    OptimizerConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.mutation_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.mu = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    const Eigen::MatrixXd one = testutil::random_matrix(5, 1, 1);
    CHECK_THROWS_AS(run_ga(center_columns(one), center(Eigen::VectorXd(one.col(0))), OptimizerConfig{}),
                    ValidationError);
}
