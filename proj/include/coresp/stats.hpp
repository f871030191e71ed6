#pragma once

#include <span>

#include <Eigen/Dense>

namespace coresp {

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

/// Definitional Pearson correlation. Returns 0 when either side has zero
/// variance.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Upper-tail-inclusive two-sided p-value of a Student t statistic,
/// P(|T| >= |t|), through the regularized incomplete beta function.
double student_t_two_sided_p(double t, double degrees_of_freedom);

struct CorrelationTest {
    double r = 0.0;
    double t = 0.0;
    double p = 1.0;
};

/// Pearson r with its t-test against zero correlation (n - 2 degrees of freedom).
CorrelationTest correlation_test(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& m);
Eigen::VectorXd center(const Eigen::VectorXd& v);

} // namespace coresp
