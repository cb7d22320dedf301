#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cseval/rng.hpp"
#include "cseval/stats.hpp"

using namespace cseval;

namespace {

// Independent oracle for integer a,b: I_x(a,b) as a binomial tail sum,
//   I_x(a,b) = sum_{j=a}^{a+b-1} C(a+b-1,j) x^j (1-x)^(a+b-1-j).
double ibeta_binomial_oracle(int a, int b, double x) {
  int n = a + b - 1;
  double sum = 0.0;
  for (int j = a; j <= n; ++j) {
    double c = 1.0;
    for (int i = 0; i < j; ++i) c = c * (n - i) / (i + 1);
    sum += c * std::pow(x, j) * std::pow(1.0 - x, n - j);
  }
  return sum;
}

}  // namespace

TEST_CASE("regularized incomplete beta: endpoints and symmetry point") {
  for (double a : {0.5, 1.0, 2.0, 7.5}) {
    for (double b : {0.5, 1.0, 3.0, 11.0}) {
      CHECK(regularized_incomplete_beta(a, b, 0.0) == 0.0);
      CHECK(regularized_incomplete_beta(a, b, 1.0) == 1.0);
      CHECK(regularized_incomplete_beta(a, a, 0.5) ==
            doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("regularized incomplete beta: frozen fixture I_0.3(2,3) = 0.3483") {
  double v = regularized_incomplete_beta(2.0, 3.0, 0.3);
  CHECK(std::fabs(v - 0.3483) <= 1e-10);
  CHECK(std::fabs(v - ibeta_binomial_oracle(2, 3, 0.3)) <= 1e-12);
}

TEST_CASE("regularized incomplete beta matches the binomial oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    int a = 1 + static_cast<int>(uniform_below(rng, 8));
    int b = 1 + static_cast<int>(uniform_below(rng, 8));
    double x = uniform_range(rng, 0.01, 0.99);
    double ours = regularized_incomplete_beta(a, b, x);
    double oracle = ibeta_binomial_oracle(a, b, x);
    CHECK(std::fabs(ours - oracle) <= 1e-11);
  }
}

TEST_CASE("I_x(a,b) + I_{1-x}(b,a) = 1 over a random sweep") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    double a = uniform_range(rng, 0.1, 50.0);
    double b = uniform_range(rng, 0.1, 50.0);
    double x = uniform_range(rng, 0.0, 1.0);
    double s = regularized_incomplete_beta(a, b, x) +
               regularized_incomplete_beta(b, a, 1.0 - x);
    CHECK(std::fabs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("regularized incomplete beta rejects bad arguments") {
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("t-test: identical samples give t=0, p=1") {
  std::vector<double> a{1.0, 2.0, 3.0};
  StatTestResult r = t_test(a, a, TTestVariant::student);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.df1 == 4.0);
}

TEST_CASE("t-test fixture: {1..5} vs {2..6}") {
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> b{2, 3, 4, 5, 6};
  StatTestResult r = t_test(a, b, TTestVariant::student);
  CHECK(r.statistic == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.df1 == 8.0);
  // High-precision oracle value for two-sided p at |t|=1, df=8.
  CHECK(std::fabs(r.p_value - 0.3465935070873342) <= 1e-6);

  StatTestResult w = t_test(a, b, TTestVariant::welch);
  CHECK(w.statistic == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w.df1 == doctest::Approx(8.0).epsilon(1e-12));  // equal variances

  CHECK_THROWS_AS(t_test(a, {1.0, 2.0}, TTestVariant::paired), ValidationError);
}

TEST_CASE("t-test error paths") {
  std::vector<double> constant{2.0, 2.0, 2.0};
  CHECK_THROWS_WITH_AS(t_test(constant, constant, TTestVariant::student),
                       doctest::Contains("pooled variance"), ValidationError);
  CHECK_THROWS_AS(t_test({1.0}, {1.0, 2.0}, TTestVariant::student),
                  ValidationError);
}

TEST_CASE("paired t-test on constant differences") {
  std::vector<double> a{1, 2, 3};
  std::vector<double> b{0, 1, 2};
  // All differences equal 1, zero variance: undefined.
  CHECK_THROWS_AS(t_test(a, b, TTestVariant::paired), ValidationError);
  // All differences zero: no effect, p = 1.
  StatTestResult r = t_test(a, a, TTestVariant::paired);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("anova: equal group means give F=0, p=1") {
  StatTestResult r = one_way_anova({{1, 2, 3}, {1, 2, 3}});
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("anova fixture F=1 and the F=t^2 identity") {
  StatTestResult r = one_way_anova({{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}});
  CHECK(r.statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.df1 == 1.0);
  CHECK(r.df2 == 8.0);
  StatTestResult t = t_test({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
  CHECK(std::fabs(r.statistic - t.statistic * t.statistic) <= 1e-9);
  CHECK(std::fabs(r.p_value - t.p_value) <= 1e-9);
}

TEST_CASE("F = t^2 on random two-group datasets") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    int na = 3 + static_cast<int>(uniform_below(rng, 8));
    int nb = 3 + static_cast<int>(uniform_below(rng, 8));
    for (int i = 0; i < na; ++i) a.push_back(uniform_range(rng, -5.0, 5.0));
    for (int i = 0; i < nb; ++i) b.push_back(uniform_range(rng, -3.0, 7.0));
    StatTestResult f = one_way_anova({a, b});
    StatTestResult t = t_test(a, b, TTestVariant::student);
    CHECK(std::fabs(f.statistic - t.statistic * t.statistic) <= 1e-9);
    CHECK(std::fabs(f.p_value - t.p_value) <= 1e-9);
  }
}

TEST_CASE("statistics are location invariant") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 6; ++i) a.push_back(uniform_range(rng, -1.0, 1.0));
    for (int i = 0; i < 5; ++i) b.push_back(uniform_range(rng, -1.0, 1.0));
    double shift = uniform_range(rng, -100.0, 100.0);
    std::vector<double> a2 = a, b2 = b;
    for (auto& v : a2) v += shift;
    for (auto& v : b2) v += shift;
    StatTestResult t1 = t_test(a, b);
    StatTestResult t2 = t_test(a2, b2);
    CHECK(t1.statistic == doctest::Approx(t2.statistic).epsilon(1e-9));
    StatTestResult f1 = one_way_anova({a, b});
    StatTestResult f2 = one_way_anova({a2, b2});
    CHECK(f1.statistic == doctest::Approx(f2.statistic).epsilon(1e-8));
  }
}

TEST_CASE("p decreases as |t| grows at fixed df") {
  double prev = 1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    double p = t_two_sided_p(t, 8.0);
    CHECK(p <= prev + 1e-15);
    if (t > 0) CHECK(p < prev);
    prev = p;
  }
  CHECK(t_two_sided_p(0.0, 8.0) == 1.0);
}

TEST_CASE("anova rejects degenerate inputs") {
  CHECK_THROWS_AS(one_way_anova({{1.0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(one_way_anova({{1.0}, {2.0, 3.0}}), ValidationError);
  CHECK_THROWS_WITH_AS(one_way_anova({{1.0, 1.0}, {2.0, 2.0}}),
                       doctest::Contains("group"), ValidationError);
}

TEST_CASE("pairwise significance") {
  std::vector<NamedSample> samples{
      {"best", {0.9, 0.91, 0.92, 0.9, 0.93}},
      {"a", {0.8, 0.81, 0.8, 0.82, 0.79}},
      {"b", {0.85, 0.86, 0.84, 0.87, 0.85}},
      {"c", {0.7, 0.72, 0.71, 0.7, 0.73}},
      {"d", {0.9, 0.91, 0.92, 0.9, 0.93}},
  };
  auto results = pairwise_significance(samples, "best");
  REQUIRE(results.size() == 4);
  for (const auto& r : results) {
    CHECK(r.test.p_value >= 0.0);
    CHECK(r.test.p_value <= 1.0);
    CHECK(r.model != "best");
    if (r.model == "d") CHECK(r.test.p_value == 1.0);  // identical samples
    if (r.model == "c") CHECK(r.test.p_value < 0.001);
  }
  CHECK_THROWS_AS(pairwise_significance(samples, "missing"), ValidationError);
}
