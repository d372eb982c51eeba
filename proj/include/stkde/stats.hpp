#pragma once

#include "stkde/types.hpp"

#include <vector>

namespace stkde {

struct TestResult {
  Scalar statistic = 0;
  Scalar p_value = 1;
};

/// Classical one-way ANOVA: F = MSB / MSW with (k-1, N-k) degrees of freedom.
/// Zero within-group variance with nonzero between-group variance reports
/// F = +infinity with p = 0; no variance at all reports F = 0, p = 1.
TestResult anova_one_way(const std::vector<std::vector<Scalar>>& groups);

/// Welch's unequal-variance two-sample t test with Welch-Satterthwaite
/// degrees of freedom; two-sided p-value.
TestResult welch_t_test(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

namespace stats_detail {

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation (modified Lentz), absolute accuracy well below 1e-8.
Scalar regularized_incomplete_beta(Scalar a, Scalar b, Scalar x);

/// Survival function of the F distribution: P(F_{df1, df2} >= f).
Scalar f_survival(Scalar f, Scalar df1, Scalar df2);

/// Two-sided tail of Student's t: 2 P(T_df >= |t|).
Scalar t_two_sided(Scalar t, Scalar df);

}  // namespace stats_detail

}  // namespace stkde
