#include "cseval/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cseval {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a,b), modified Lentz iteration.
double ibeta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  constexpr int max_iters = 300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iters; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sum of squared deviations from the mean.
double ss_dev(const std::vector<double>& v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("regularized_incomplete_beta: a and b must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError("regularized_incomplete_beta: x must lie in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * ibeta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   ibeta_cf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("t distribution needs df > 0");
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double f_upper_p(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) {
    throw ValidationError("F distribution needs positive df");
  }
  if (f <= 0.0) return 1.0;
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

StatTestResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) {
    throw ValidationError("one_way_anova needs at least 2 groups");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw ValidationError("one_way_anova: group " + std::to_string(g) +
                            " has fewer than 2 values");
    }
  }
  double grand_sum = 0.0;
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    for (double x : g) grand_sum += x;
    n_total += g.size();
  }
  double grand_mean = grand_sum / static_cast<double>(n_total);

  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    ss_within += ss_dev(g, m);
  }
  if (ss_within <= 0.0) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (ss_dev(groups[g], mean(groups[g])) <= 0.0) {
        throw ValidationError("one_way_anova: group " + std::to_string(g) +
                              " has zero variance; F is undefined");
      }
    }
  }
  double df1 = static_cast<double>(groups.size()) - 1.0;
  double df2 = static_cast<double>(n_total - groups.size());
  double f = (ss_between / df1) / (ss_within / df2);

  StatTestResult result;
  result.test = "anova_oneway";
  result.statistic = f;
  result.df1 = df1;
  result.df2 = df2;
  result.p_value = f_upper_p(f, df1, df2);
  return result;
}

StatTestResult t_test(const std::vector<double>& a, const std::vector<double>& b,
                      TTestVariant variant) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("t_test needs at least 2 values per sample");
  }
  StatTestResult result;
  double t = 0.0, df = 0.0;

  switch (variant) {
    case TTestVariant::student: {
      result.test = "t_test_student";
      double na = static_cast<double>(a.size());
      double nb = static_cast<double>(b.size());
      double ma = mean(a), mb = mean(b);
      double pooled = (ss_dev(a, ma) + ss_dev(b, mb)) / (na + nb - 2.0);
      if (pooled <= 0.0) {
        throw ValidationError("t_test: zero pooled variance");
      }
      t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
      df = na + nb - 2.0;
      break;
    }
    case TTestVariant::welch: {
      result.test = "t_test_welch";
      double na = static_cast<double>(a.size());
      double nb = static_cast<double>(b.size());
      double ma = mean(a), mb = mean(b);
      double va = ss_dev(a, ma) / (na - 1.0);
      double vb = ss_dev(b, mb) / (nb - 1.0);
      double se2 = va / na + vb / nb;
      if (se2 <= 0.0) {
        throw ValidationError("t_test: zero variance in both samples");
      }
      t = (ma - mb) / std::sqrt(se2);
      df = se2 * se2 /
           (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
      break;
    }
    case TTestVariant::paired: {
      result.test = "t_test_paired";
      if (a.size() != b.size()) {
        throw ValidationError("paired t_test needs equal sample sizes");
      }
      std::vector<double> diff(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
      double n = static_cast<double>(diff.size());
      double md = mean(diff);
      double vd = ss_dev(diff, md) / (n - 1.0);
      if (vd <= 0.0) {
        if (md == 0.0) {
          // All differences identical and zero: no effect, p = 1.
          result.statistic = 0.0;
          result.df1 = n - 1.0;
          result.p_value = 1.0;
          return result;
        }
        throw ValidationError("t_test: zero variance of paired differences");
      }
      t = md / std::sqrt(vd / n);
      df = n - 1.0;
      break;
    }
  }

  result.statistic = t;
  result.df1 = df;
  result.p_value = t_two_sided_p(t, df);
  return result;
}

std::vector<PairwiseResult> pairwise_significance(
    const std::vector<NamedSample>& samples, const std::string& baseline,
    TTestVariant variant) {
  const NamedSample* base = nullptr;
  for (const auto& s : samples) {
    if (s.name == baseline) base = &s;
  }
  if (!base) {
    throw ValidationError("baseline '" + baseline + "' not among the samples");
  }
  std::vector<PairwiseResult> results;
  for (const auto& s : samples) {
    if (s.name == baseline) continue;
    if (s.values.size() != base->values.size()) {
      throw ValidationError("sample '" + s.name +
                            "' has a different seed count than the baseline");
    }
    PairwiseResult pr;
    pr.model = s.name;
    pr.test = t_test(base->values, s.values, variant);
    results.push_back(std::move(pr));
  }
  return results;
}

}  // namespace cseval
