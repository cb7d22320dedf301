#include "cseval/agreement.hpp"

#include <array>
#include <cmath>

namespace cseval {

namespace {

struct Retained {
  std::vector<std::size_t> items;  // indices with >= 2 ratings
  std::size_t dropped = 0;
};

Retained retain_items(const AnnotationTable& table) {
  Retained r;
  for (std::size_t i = 0; i < table.items.size(); ++i) {
    if (table.n_ratings(i) >= 2) {
      r.items.push_back(i);
    } else {
      ++r.dropped;
    }
  }
  return r;
}

AgreementReport base_report(const AnnotationTable& table, const char* metric,
                            const Retained& retained) {
  AgreementReport rep;
  rep.dimension = std::string(dimension(table.dim_index).name);
  rep.metric = metric;
  rep.n_items = retained.items.size();
  rep.n_annotators = table.annotators.size();
  rep.n_missing = retained.dropped;
  return rep;
}

}  // namespace

AgreementReport fleiss_kappa(const AnnotationTable& table) {
  table.validate();
  const auto& dim = dimension(table.dim_index);
  const int k = dim.num_classes();
  Retained retained = retain_items(table);
  AgreementReport rep = base_report(table, "fleiss_kappa", retained);
  if (retained.items.empty()) {
    throw ValidationError("fleiss_kappa: no items with at least 2 ratings");
  }

  double p_bar = 0.0;
  std::vector<double> category_totals(static_cast<std::size_t>(k), 0.0);
  double total_ratings = 0.0;
  for (std::size_t item : retained.items) {
    std::array<double, 3> counts{0.0, 0.0, 0.0};
    double n_i = 0.0;
    for (std::size_t a = 0; a < table.annotators.size(); ++a) {
      auto v = table.at(item, a);
      if (!v) continue;
      counts[static_cast<std::size_t>(dim.class_index(*v))] += 1.0;
      n_i += 1.0;
    }
    double agree_pairs = 0.0;
    for (int c = 0; c < k; ++c) {
      auto cc = counts[static_cast<std::size_t>(c)];
      agree_pairs += cc * (cc - 1.0);
      category_totals[static_cast<std::size_t>(c)] += cc;
    }
    p_bar += agree_pairs / (n_i * (n_i - 1.0));
    total_ratings += n_i;
  }
  p_bar /= static_cast<double>(retained.items.size());

  double pe = 0.0;
  for (int c = 0; c < k; ++c) {
    double pc = category_totals[static_cast<std::size_t>(c)] / total_ratings;
    pe += pc * pc;
  }

  if (pe >= 1.0 - 1e-15) {
    // Every rating fell in one category.
    if (p_bar >= 1.0 - 1e-15) {
      rep.value = 1.0;
      rep.degenerate = true;
      return rep;
    }
    throw ValidationError("fleiss_kappa undefined: expected agreement is 1 "
                          "but observed agreement is not");
  }
  rep.value = (p_bar - pe) / (1.0 - pe);
  return rep;
}

namespace {

// Squared difference function on class indices, given coincidence marginals.
double ordinal_delta_sq(int c, int kk, const std::vector<double>& marginals) {
  if (c == kk) return 0.0;
  int lo = std::min(c, kk), hi = std::max(c, kk);
  double span = 0.0;
  for (int g = lo; g <= hi; ++g) span += marginals[static_cast<std::size_t>(g)];
  span -= (marginals[static_cast<std::size_t>(lo)] +
           marginals[static_cast<std::size_t>(hi)]) /
          2.0;
  return span * span;
}

}  // namespace

AgreementReport krippendorff_alpha(const AnnotationTable& table,
                                   AlphaLevel level) {
  table.validate();
  const auto& dim = dimension(table.dim_index);
  const int k = dim.num_classes();
  Retained retained = retain_items(table);
  AgreementReport rep = base_report(table, "krippendorff_alpha", retained);
  if (retained.items.empty()) {
    throw ValidationError("krippendorff_alpha: no items with at least 2 ratings");
  }

  // Coincidence matrix: each ordered pair of ratings within an item
  // contributes 1/(n_i - 1).
  std::vector<double> coin(static_cast<std::size_t>(k * k), 0.0);
  for (std::size_t item : retained.items) {
    std::vector<int> vals;
    for (std::size_t a = 0; a < table.annotators.size(); ++a) {
      auto v = table.at(item, a);
      if (v) vals.push_back(dim.class_index(*v));
    }
    double w = 1.0 / (static_cast<double>(vals.size()) - 1.0);
    for (std::size_t p = 0; p < vals.size(); ++p) {
      for (std::size_t q = 0; q < vals.size(); ++q) {
        if (p == q) continue;
        coin[static_cast<std::size_t>(vals[p] * k + vals[q])] += w;
      }
    }
  }

  std::vector<double> marginals(static_cast<std::size_t>(k), 0.0);
  double n = 0.0;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < k; ++j) {
      marginals[static_cast<std::size_t>(c)] +=
          coin[static_cast<std::size_t>(c * k + j)];
    }
    n += marginals[static_cast<std::size_t>(c)];
  }

  auto delta_sq = [&](int c, int j) {
    if (level == AlphaLevel::nominal) return c == j ? 0.0 : 1.0;
    return ordinal_delta_sq(c, j, marginals);
  };

  double d_o = 0.0, d_e = 0.0;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < k; ++j) {
      double d2 = delta_sq(c, j);
      d_o += coin[static_cast<std::size_t>(c * k + j)] * d2;
      d_e += marginals[static_cast<std::size_t>(c)] *
             marginals[static_cast<std::size_t>(j)] * d2;
    }
  }
  d_o /= n;
  d_e /= n * (n - 1.0);

  if (d_e <= 1e-15) {
    if (d_o <= 1e-15) {
      rep.value = 1.0;
      rep.degenerate = true;
      return rep;
    }
    throw ValidationError("krippendorff_alpha undefined: no expected "
                          "disagreement but observed disagreement present");
  }
  rep.value = 1.0 - d_o / d_e;
  return rep;
}

AgreementReport percent_agreement(const AnnotationTable& table) {
  table.validate();
  Retained retained = retain_items(table);
  AgreementReport rep = base_report(table, "percent_agreement", retained);
  if (retained.items.empty()) {
    throw ValidationError("percent_agreement: no items with at least 2 ratings");
  }
  std::size_t unanimous = 0;
  for (std::size_t item : retained.items) {
    int first = -1;
    bool all_equal = true;
    for (std::size_t a = 0; a < table.annotators.size(); ++a) {
      auto v = table.at(item, a);
      if (!v) continue;
      if (first < 0) {
        first = *v;
      } else if (*v != first) {
        all_equal = false;
        break;
      }
    }
    if (all_equal) ++unanimous;
  }
  rep.value = static_cast<double>(unanimous) /
              static_cast<double>(retained.items.size());
  return rep;
}

AgreementReport designated_metric(const AnnotationTable& table,
                                  AlphaLevel level) {
  const auto& dim = dimension(table.dim_index);
  if (dim.name == "audience_adaptation") return percent_agreement(table);
  if (dim.kind == DimKind::binary) return fleiss_kappa(table);
  return krippendorff_alpha(table, level);
}

std::vector<PairwiseReport> pairwise_reports(const AnnotationTable& table,
                                             AlphaLevel level) {
  if (table.annotators.size() < 2) {
    throw ValidationError("pairwise reports need at least 2 annotators");
  }
  std::vector<PairwiseReport> reports;
  for (std::size_t a = 0; a < table.annotators.size(); ++a) {
    for (std::size_t b = a + 1; b < table.annotators.size(); ++b) {
      PairwiseReport pr;
      pr.annotator_a = table.annotators[a];
      pr.annotator_b = table.annotators[b];
      pr.report = designated_metric(pair_subtable(table, a, b), level);
      reports.push_back(std::move(pr));
    }
  }
  return reports;
}

}  // namespace cseval
