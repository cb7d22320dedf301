#pragma once

#include <string>
#include <vector>

#include "cseval/errors.hpp"

namespace cseval {

// I_x(a,b), continued-fraction evaluation with the symmetry transform for
// x > (a+1)/(a+b+2). Absolute error <= 1e-12 for a,b <= 1e3.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of the t distribution.
double t_two_sided_p(double t, double df);

// Upper tail of the F distribution.
double f_upper_p(double f, double df1, double df2);

struct StatTestResult {
  std::string test;  // anova_oneway | t_test_student | t_test_welch | t_test_paired
  double statistic = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;  // 0 for t-tests (single df in df1)
  double p_value = 1.0;
};

// F = MS_between / MS_within with df (g-1, N-g).
StatTestResult one_way_anova(const std::vector<std::vector<double>>& groups);

enum class TTestVariant { student, welch, paired };

StatTestResult t_test(const std::vector<double>& a, const std::vector<double>& b,
                      TTestVariant variant = TTestVariant::student);

struct NamedSample {
  std::string name;
  std::vector<double> values;
};

struct PairwiseResult {
  std::string model;
  StatTestResult test;
};

// Baseline vs every other sample. No multiple-comparison correction is
// applied; consumers should footnote that.
std::vector<PairwiseResult> pairwise_significance(
    const std::vector<NamedSample>& samples, const std::string& baseline,
    TTestVariant variant = TTestVariant::student);

}  // namespace cseval
