#include "coresp/split.hpp"

#include "coresp/error.hpp"
#include "coresp/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace coresp {

SplitPlan stratified_split(const Eigen::VectorXd& y, double fraction, int n_strata, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(y.size());
    if (!(fraction > 0.0)) throw ValidationError("split fraction must be positive (train set would be empty)");
    if (!(fraction < 1.0)) throw ValidationError("split fraction must be below 1 (test set would be empty)");
    if (n < 2) throw ValidationError("need at least two samples to split");
    if (n_strata < 1) throw ValidationError("number of strata must be positive");

    SplitPlan plan;
    plan.fraction = fraction;
    plan.n_strata = n_strata;
    plan.seed = seed;
    plan.stratum_of.assign(n, 0);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return y[static_cast<Eigen::Index>(a)] < y[static_cast<Eigen::Index>(b)];
    });

    const auto bins = static_cast<std::size_t>(n_strata);
    Xoshiro256 rng(seed);
    bool round_up = false;
    bool small_to_train = true;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = n * b / bins;
        const std::size_t hi = n * (b + 1) / bins;
        std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                         order.begin() + static_cast<std::ptrdiff_t>(hi));
        for (auto i : members) plan.stratum_of[i] = static_cast<int>(b);
        if (members.empty()) continue;
        if (members.size() < 2) {
            plan.warnings.push_back(fmt::format("stratum {} has a single sample; assigned alternately", b));
            (small_to_train ? plan.train_indices : plan.test_indices).push_back(members.front());
            small_to_train = !small_to_train;
            continue;
        }
        rng.shuffle(members);
        const double exact = fraction * static_cast<double>(members.size());
        auto take = static_cast<std::size_t>(std::floor(exact));
        if (exact > static_cast<double>(take)) {
            if (round_up) ++take;
            round_up = !round_up;
        }
        for (std::size_t k = 0; k < members.size(); ++k) {
            (k < take ? plan.train_indices : plan.test_indices).push_back(members[k]);
        }
    }
    if (plan.train_indices.empty()) throw ValidationError("stratified split produced an empty training set");
    if (plan.test_indices.empty()) throw ValidationError("stratified split produced an empty test set");
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(rows[i])];
    return out;
}

} // namespace coresp
