#include "coresp/stats.hpp"

#include "coresp/error.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

namespace coresp {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
    const Eigen::VectorXd a0 = center(a);
    const Eigen::VectorXd b0 = center(b);
    const double saa = a0.squaredNorm();
    const double sbb = b0.squaredNorm();
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return a0.dot(b0) / std::sqrt(saa * sbb);
}

double student_t_two_sided_p(double t, double degrees_of_freedom) {
    if (!(degrees_of_freedom > 0.0)) throw ValidationError("t distribution needs positive degrees of freedom");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) throw NumericError("t statistic is NaN");
    const double x = degrees_of_freedom / (degrees_of_freedom + t * t);
    return boost::math::ibeta(degrees_of_freedom / 2.0, 0.5, x);
}

CorrelationTest correlation_test(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    CorrelationTest out;
    out.r = pearson(a, b);
    const double df = static_cast<double>(a.size()) - 2.0;
    if (df <= 0.0) return out;
    const double denom = 1.0 - out.r * out.r;
    out.t = denom <= 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), out.r)
                         : out.r * std::sqrt(df / denom);
    out.p = student_t_two_sided_p(out.t, df);
    return out;
}

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return m;
    const Eigen::RowVectorXd means = m.colwise().mean();
    return m.rowwise() - means;
}

Eigen::VectorXd center(const Eigen::VectorXd& v) {
    if (v.size() == 0) return v;
    return v.array() - v.mean();
}

} // namespace coresp
