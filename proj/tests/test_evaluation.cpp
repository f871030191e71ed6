#include "doctest.h"

#include <algorithm>
#include <set>

#include "coresp/error.hpp"
#include "coresp/evaluation.hpp"
#include "coresp/random.hpp"
#include "coresp/split.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coresp;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
    return testutil::random_matrix(n, 1, seed, -1.0, 1.0).col(0);
}

std::vector<std::size_t> per_stratum(const SplitPlan& plan, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(plan.n_strata), 0);
    for (auto i : idx) ++counts[static_cast<std::size_t>(plan.stratum_of[i])];
    return counts;
}

} // namespace

TEST_CASE("split of 20 samples into 10 strata puts one of each pair in train") {
    const auto plan = stratified_split(random_vector(20, 1), 0.5, 10, 7);
    CHECK(plan.train_indices.size() == 10);
    CHECK(plan.test_indices.size() == 10);
    CHECK(per_stratum(plan, plan.train_indices) == std::vector<std::size_t>(10, 1));
    CHECK(per_stratum(plan, plan.test_indices) == std::vector<std::size_t>(10, 1));
    CHECK(plan.warnings.empty());
}

TEST_CASE("strata follow the order of y") {
    Eigen::VectorXd y(6);
    y << 6, 1, 5, 2, 4, 3;
    const auto plan = stratified_split(y, 0.5, 3, 0);
    CHECK(plan.stratum_of == std::vector<int>{2, 0, 2, 0, 1, 1});
}

TEST_CASE("split fraction bounds") {
    const auto y = random_vector(20, 2);
    CHECK_THROWS_AS(stratified_split(y, 1.0), ValidationError);
    CHECK_THROWS_AS(stratified_split(y, 0.0), ValidationError);
}

TEST_CASE("per-stratum counts do not depend on the seed") {
    const auto y = random_vector(73, 3);
    const auto ref = stratified_split(y, 0.5, 10, 0);
    const auto ref_train = per_stratum(ref, ref.train_indices);
    std::set<std::vector<std::size_t>> distinct;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto plan = stratified_split(y, 0.5, 10, seed);
        CHECK(per_stratum(plan, plan.train_indices) == ref_train);
        distinct.insert(plan.train_indices);

        std::vector<std::size_t> all = plan.train_indices;
        all.insert(all.end(), plan.test_indices.begin(), plan.test_indices.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expected(73);
        for (std::size_t i = 0; i < 73; ++i) expected[i] = i;
        CHECK(all == expected);
    }
    CHECK(distinct.size() > 90);
    CHECK(ref.train_indices.size() + 1 >= ref.test_indices.size());
    CHECK(ref.test_indices.size() + 1 >= ref.train_indices.size());
}

TEST_CASE("tiny strata are flagged") {
    const auto plan = stratified_split(random_vector(8, 4), 0.5, 6, 1);
    CHECK_FALSE(plan.warnings.empty());
    CHECK(plan.train_indices.size() + plan.test_indices.size() == 8);
}

TEST_CASE("paired t-test") {
    SUBCASE("identical samples have no defined statistic") {
        const std::vector<double> a{0.1, 0.2, 0.3};
        CHECK_THROWS_AS(paired_t_test(a, a), NumericError);
    }
    SUBCASE("length mismatch") {
        const std::vector<double> a{0.1, 0.2, 0.3}, b{0.1, 0.2};
        CHECK_THROWS_AS(paired_t_test(a, b), ValidationError);
    }
    SUBCASE("textbook example") {
        const std::vector<double> a{5.1, 4.8, 6.0, 5.5, 5.2};
        const std::vector<double> b{4.9, 4.7, 5.6, 5.6, 4.8};
        const auto res = paired_t_test(a, b);
        CHECK(res.t == doctest::Approx(2.108185106778919).epsilon(1e-12));
        CHECK(res.degrees_of_freedom == 4.0);
        CHECK(std::abs(res.p - oracle::t_two_sided_p(res.t, 4.0)) < 1e-9);
        CHECK(res.p == doctest::Approx(0.10270042749551189).epsilon(1e-9));
        CHECK_FALSE(res.significant);
    }
    SUBCASE("consistent shift is significant") {
        Xoshiro256 rng(3);
        std::vector<double> a, b;
        for (int i = 0; i < 20; ++i) {
            b.push_back(rng.uniform());
            a.push_back(b.back() + 0.05 + 0.01 * rng.normal());
        }
        const auto res = paired_t_test(a, b);
        CHECK(res.p < 0.05);
        CHECK(res.significant);
        CHECK(res.t > 0.0);
        CHECK(paired_t_test(b, a).t == doctest::Approx(-res.t));
    }
}

namespace {

struct Dataset {
    AbundanceMatrix h;
    FunctionalVariable y;
    CoOccurrenceNetwork net;
};

Dataset small_dataset(std::uint64_t seed) {
    Dataset d;
    d.h.values = testutil::random_matrix(40, 8, seed, 0.0, 10.0);
    for (int i = 0; i < 40; ++i) d.h.sample_ids.push_back("s" + std::to_string(i));
    for (int j = 0; j < 8; ++j) d.h.taxon_labels.push_back("t" + std::to_string(j));
    d.net = CoOccurrenceNetwork{testutil::random_adjacency(8, seed + 1), d.h.taxon_labels};
    const auto topo = convolve(d.h, d.net);
    d.y.values = topo.values.col(1) + topo.values.col(5) + random_vector(40, seed + 2);
    d.y.sample_ids = d.h.sample_ids;
    d.y.name = "f";
    return d;
}

MethodSpec method(const std::string& tag, bool graph) {
    MethodSpec m;
    m.tag = tag;
    m.use_graph = graph;
    m.optimizer.k_opt = 3;
    m.optimizer.population_size = 30;
    m.optimizer.max_generations = 40;
    m.optimizer.stagnation_limit = 10;
    return m;
}

} // namespace

TEST_CASE("evaluation is reproducible and paired across methods") {
    const auto d = small_dataset(10);
    EvaluationProtocol proto;
    proto.repeats = 5;
    proto.seed = 4;
    const auto a = evaluate_method(d.h, &d.net, d.y, method("graph", true), proto);
    const auto b = evaluate_method(d.h, &d.net, d.y, method("graph", true), proto);
    CHECK(a.per_repeat_test_r == b.per_repeat_test_r);
    CHECK(a.per_repeat_test_r.size() == 5);
    double sum = 0.0;
    for (double r : a.per_repeat_test_r) sum += r;
    CHECK(a.mean_r == doctest::Approx(sum / 5.0));

    proto.threads = 3;
    CHECK(evaluate_method(d.h, &d.net, d.y, method("graph", true), proto).per_repeat_test_r == a.per_repeat_test_r);
}

TEST_CASE("an empty network reproduces the no-graph baseline exactly") {
    const auto d = small_dataset(20);
    EvaluationProtocol proto;
    proto.repeats = 4;
    const auto empty = CoOccurrenceNetwork::empty_graph(d.h.taxon_labels);
    const auto with_empty = evaluate_method(d.h, &empty, d.y, method("g", true), proto);
    const auto baseline = evaluate_method(d.h, nullptr, d.y, method("b", true), proto);
    const auto disabled = evaluate_method(d.h, &d.net, d.y, method("b", false), proto);
    CHECK(with_empty.per_repeat_test_r == baseline.per_repeat_test_r);
    CHECK(with_empty.per_repeat_group_size == baseline.per_repeat_group_size);
    CHECK(disabled.per_repeat_test_r == baseline.per_repeat_test_r);
}

TEST_CASE("report writers") {
    testutil::TempDir dir;
    EvaluationReport r;
    r.method_tag = "m";
    r.per_repeat_test_r = {0.25, 0.5};
    r.mean_r = 0.375;
    r.std_r = 0.1767766952966369;
    write_report_table(dir / "t.csv", {r}, 12);
    write_report_summary(dir / "s.csv", {r}, 12);
    CHECK(testutil::read_text(dir / "t.csv") == "repeat,method,test_r\n0,m,0.25\n1,m,0.5\n");
    CHECK(testutil::read_text(dir / "s.csv") == "method,mean,std,n\nm,0.375,0.176776695297,2\n");
}
