#include "doctest.h"

#include "coresp/error.hpp"
#include "coresp/ingest.hpp"
#include "coresp/random.hpp"
#include "test_util.hpp"

using namespace coresp;

TEST_CASE("load_abundance reads a labeled table") {
    testutil::TempDir dir;
    testutil::write_text(dir / "a.csv", "sample,t1,t2\ns1,1,0\ns2,2,5\ns3,0,3\n");
    const auto m = load_abundance(dir / "a.csv");
    CHECK(m.n_samples() == 3);
    CHECK(m.n_taxa() == 2);
    CHECK(m.taxon_labels == std::vector<std::string>{"t1", "t2"});
    CHECK(m.sample_ids == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(m.values(1, 1) == 5.0);
    CHECK(m.values(2, 0) == 0.0);
}

TEST_CASE("taxa-as-rows orientation gives the same matrix") {
    testutil::TempDir dir;
    testutil::write_text(dir / "a.csv", "sample,t1,t2\ns1,1,0\ns2,2,5\ns3,0,3\n");
    testutil::write_text(dir / "b.tsv", "taxon\ts1\ts2\ts3\nt1\t1\t2\t0\nt2\t0\t5\t3\n");
    const auto a = load_abundance(dir / "a.csv");
    const auto b = load_abundance(dir / "b.tsv", Orientation::taxa_as_rows);
    CHECK(a.values == b.values);
    CHECK(a.sample_ids == b.sample_ids);
    CHECK(a.taxon_labels == b.taxon_labels);
}

TEST_CASE("load_abundance error paths") {
    testutil::TempDir dir;
    SUBCASE("ragged row reports its line") {
        testutil::write_text(dir / "x.csv", "s,t1,t2\na,1,2\nb,3\n");
        try {
            load_abundance(dir / "x.csv");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("non-numeric cell reports coordinates") {
        testutil::write_text(dir / "x.csv", "s,t1,t2\na,1,2\nb,3,abc\n");
        try {
            load_abundance(dir / "x.csv");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 3, column 3") != std::string::npos);
        }
    }
    SUBCASE("missing values are rejected") {
        testutil::write_text(dir / "x.csv", "s,t1,t2\na,1,NA\n");
        CHECK_THROWS_AS(load_abundance(dir / "x.csv"), ParseError);
        testutil::write_text(dir / "y.csv", "s,t1,t2\na,1,\n");
        CHECK_THROWS_AS(load_abundance(dir / "y.csv"), ParseError);
    }
    SUBCASE("duplicate labels") {
        testutil::write_text(dir / "x.csv", "s,t1,t1\na,1,2\n");
        CHECK_THROWS_AS(load_abundance(dir / "x.csv"), ValidationError);
        testutil::write_text(dir / "y.csv", "s,t1,t2\na,1,2\na,3,4\n");
        CHECK_THROWS_AS(load_abundance(dir / "y.csv"), ValidationError);
    }
    SUBCASE("negative abundance") {
        testutil::write_text(dir / "x.csv", "s,t1\na,-1\nb,2\n");
        CHECK_THROWS_AS(load_abundance(dir / "x.csv"), ValidationError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_abundance(dir / "nope.csv"), IoError); }
}

TEST_CASE("bacteria-scale table loads with its dimensions") {
    testutil::TempDir dir;
    Xoshiro256 rng(5);
    std::string text = "sample";
    for (int j = 0; j < 164; ++j) text += ",g" + std::to_string(j);
    text += "\n";
    for (int i = 0; i < 125; ++i) {
        text += "s" + std::to_string(i);
        for (int j = 0; j < 164; ++j) text += "," + std::to_string(rng.below(50));
        text += "\n";
    }
    testutil::write_text(dir / "big.csv", text);
    const auto m = load_abundance(dir / "big.csv");
    CHECK(m.n_samples() == 125);
    CHECK(m.n_taxa() == 164);
}

TEST_CASE("write then load round-trips bit-exactly") {
    testutil::TempDir dir;
    Xoshiro256 rng(11);
    AbundanceMatrix m;
    m.values.resize(7, 5);
    for (int i = 0; i < 7; ++i) {
        m.sample_ids.push_back("s" + std::to_string(i));
        for (int j = 0; j < 5; ++j) m.values(i, j) = rng.bernoulli(0.3) ? 0.0 : rng.uniform() * 1e3 / 7.0;
    }
    for (int j = 0; j < 5; ++j) m.taxon_labels.push_back("t" + std::to_string(j));
    write_abundance(dir / "a.csv", m);
    const auto back = load_abundance(dir / "a.csv");
    CHECK(back.values == m.values);
    write_abundance(dir / "b.csv", back);
    CHECK(testutil::read_text(dir / "a.csv") == testutil::read_text(dir / "b.csv"));
}

TEST_CASE("functional variable joins by sample id") {
    testutil::TempDir dir;
    testutil::write_text(dir / "y.csv", "sample_id,PMN\ns3,3.5\ns1,1.5\ns2,2.5\n");
    const auto y = load_functional(dir / "y.csv", {"s1", "s2", "s3"});
    CHECK(y.name == "PMN");
    CHECK(y.values[0] == 1.5);
    CHECK(y.values[2] == 3.5);

    testutil::write_text(dir / "bad.csv", "sample_id,PMN\ns1,1\ns9,2\n");
    try {
        load_functional(dir / "bad.csv", {"s1", "s2"});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("s2") != std::string::npos);
        CHECK(msg.find("s9") != std::string::npos);
    }

    testutil::write_text(dir / "flat.csv", "sample_id,PMN\ns1,1\ns2,1\n");
    CHECK_THROWS_AS(load_functional(dir / "flat.csv", {"s1", "s2"}), ValidationError);
}

namespace {

AbundanceMatrix make(const Eigen::MatrixXd& v) {
    AbundanceMatrix m;
    m.values = v;
    for (Eigen::Index i = 0; i < v.rows(); ++i) m.sample_ids.push_back("s" + std::to_string(i));
    for (Eigen::Index j = 0; j < v.cols(); ++j) m.taxon_labels.push_back("t" + std::to_string(j));
    return m;
}

AbundanceMatrix column_with_zeros(int zeros, int n) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(n, 2);
    for (int i = 0; i < zeros; ++i) v(i, 1) = 0.0;
    return make(v);
}

} // namespace

TEST_CASE("sparsity filter threshold is strict") {
    CHECK(filter_sparse_taxa(column_with_zeros(81, 100), 0.80).n_taxa() == 1);
    CHECK(filter_sparse_taxa(column_with_zeros(80, 100), 0.80).n_taxa() == 2);
}

TEST_CASE("sparsity filter drops an all-zero column and keeps order") {
    Eigen::MatrixXd v = testutil::random_matrix(10, 5, 3, 0.5, 2.0);
    v(3, 0) = 0.0;  // 1 zero of 10
    v.col(2).setZero();
    for (int i = 0; i < 9; ++i) v(i, 4) = 0.0;  // 9 of 10: dropped
    // Zero counts per column by hand: {1, 0, 10, 0, 9} -> keep t0, t1, t3.
    const auto out = filter_sparse_taxa(make(v));
    CHECK(out.taxon_labels == std::vector<std::string>{"t0", "t1", "t3"});
    CHECK(out.values.col(2) == v.col(3));

    Eigen::MatrixXd w = v;
    w.col(4).setOnes();
    CHECK(filter_sparse_taxa(make(w)).n_taxa() == 4);
    CHECK_THROWS_AS(filter_sparse_taxa(make(Eigen::MatrixXd::Zero(4, 3))), ValidationError);
}

TEST_CASE("sparsity filter is idempotent") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Xoshiro256 rng(seed);
        Eigen::MatrixXd v(12, 9);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 9; ++j) v(i, j) = rng.bernoulli(0.7) ? 0.0 : rng.uniform();
        v.col(0).setOnes();
        const auto once = filter_sparse_taxa(make(v), 0.6);
        const auto twice = filter_sparse_taxa(once, 0.6);
        CHECK(once.values == twice.values);
        CHECK(once.taxon_labels == twice.taxon_labels);
    }
}

TEST_CASE("CSS normalization") {
    SUBCASE("equal counts") {
        Eigen::MatrixXd v(1, 4);
        v << 1, 1, 1, 1;
        const auto out = css_normalize(make(v));
        for (int j = 0; j < 4; ++j) CHECK(out.values(0, j) == doctest::Approx(250.0));
    }
    SUBCASE("uniform row sums to the scale") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Constant(1, 7, 3.0);
        const auto out = css_normalize(make(v));
        CHECK(out.values.sum() == doctest::Approx(1000.0));
        CHECK(out.values.maxCoeff() == out.values.minCoeff());
    }
    SUBCASE("hand example with zeros") {
        // nonzero {4, 1, 3, 2}: sorted {1,2,3,4}, median 2.5, s = 1 + 2 = 3.
        Eigen::MatrixXd v(1, 5);
        v << 4, 0, 1, 3, 2;
        const auto out = css_normalize(make(v));
        CHECK(out.values(0, 0) == doctest::Approx(4.0 / 3.0 * 1000.0));
        CHECK(out.values(0, 1) == 0.0);
    }
    SUBCASE("row scale invariance") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Eigen::MatrixXd v = testutil::random_matrix(6, 8, seed, 0.0, 50.0);
            v(0, 3) = 0.0;
            Eigen::MatrixXd w = v;
            w.row(2) *= 2.0;
            w.row(4) *= 37.5;
            const auto a = css_normalize(make(v));
            const auto b = css_normalize(make(w));
            CHECK(a.values.row(2) == b.values.row(2));
            CHECK((a.values.row(4) - b.values.row(4)).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("empty sample is an error naming it") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Ones(3, 3);
        v.row(1).setZero();
        try {
            css_normalize(make(v));
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("s1") != std::string::npos);
        }
    }
}
