#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "eif/errors.hpp"

namespace eif {

// Binary verdicts S_{i,j,k} for one instance: outer index j over
// instructions, inner index k over that instruction's constraints.
struct ScoreMatrix {
  std::vector<std::vector<int>> rows;
};

namespace detail {
inline void require_nonempty(const ScoreMatrix& s) {
  if (s.rows.empty()) throw EmptyMatrixError("score matrix has no instructions");
  for (const auto& row : s.rows) {
    if (row.empty()) throw EmptyMatrixError("score matrix has an instruction with no constraints");
  }
}
}  // namespace detail

// mean over instructions of the product of that instruction's verdicts
inline double ila_instance(const ScoreMatrix& s) {
  detail::require_nonempty(s);
  double satisfied = 0.0;
  for (const auto& row : s.rows) {
    int prod = 1;
    for (int v : row) prod *= v;
    satisfied += prod;
  }
  return satisfied / static_cast<double>(s.rows.size());
}

// fraction of all verdicts that are 1
inline double cla_instance(const ScoreMatrix& s) {
  detail::require_nonempty(s);
  long long hits = 0;
  long long total = 0;
  for (const auto& row : s.rows) {
    for (int v : row) hits += v;
    total += static_cast<long long>(row.size());
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

inline int full_satisfaction(const ScoreMatrix& s) {
  detail::require_nonempty(s);
  for (const auto& row : s.rows) {
    for (int v : row) {
      if (v != 1) return 0;
    }
  }
  return 1;
}

struct InstanceMetrics {
  double ila = 0.0;
  double cla = 0.0;
  int full = 0;
};

inline InstanceMetrics instance_metrics(const ScoreMatrix& s) {
  return {ila_instance(s), cla_instance(s), full_satisfaction(s)};
}

struct AggregateMetrics {
  double ila = 0.0;
  double cla = 0.0;
  double full_rate = 0.0;
  int n = 0;
};

inline AggregateMetrics aggregate(const std::vector<InstanceMetrics>& ms) {
  if (ms.empty()) throw EmptyListError("cannot aggregate zero instances");
  AggregateMetrics a;
  a.n = static_cast<int>(ms.size());
  for (const InstanceMetrics& m : ms) {
    a.ila += m.ila;
    a.cla += m.cla;
    a.full_rate += m.full;
  }
  a.ila /= a.n;
  a.cla /= a.n;
  a.full_rate /= a.n;
  return a;
}

// Fleiss' kappa (Fleiss 1971). `ratings` holds per-item category counts;
// every row must sum to the same rater count r >= 2.
inline double fleiss_kappa(const std::vector<std::vector<int>>& ratings) {
  if (ratings.size() < 2) throw ShapeError("fleiss_kappa requires at least 2 items");
  const std::size_t categories = ratings.front().size();
  if (categories < 2) throw ShapeError("fleiss_kappa requires at least 2 categories");
  long long raters = 0;
  for (int v : ratings.front()) raters += v;
  if (raters < 2) throw ShapeError("fleiss_kappa requires at least 2 raters");

  const double n_items = static_cast<double>(ratings.size());
  const double r = static_cast<double>(raters);
  std::vector<double> category_share(categories, 0.0);
  double p_bar = 0.0;
  for (const auto& row : ratings) {
    if (row.size() != categories) throw ShapeError("fleiss_kappa rows have differing widths");
    long long row_sum = 0;
    double sq = 0.0;
    for (std::size_t k = 0; k < categories; ++k) {
      if (row[k] < 0) throw ShapeError("fleiss_kappa counts must be non-negative");
      row_sum += row[k];
      sq += static_cast<double>(row[k]) * row[k];
      category_share[k] += row[k];
    }
    if (row_sum != raters) throw ShapeError("fleiss_kappa rows must all sum to the rater count");
    p_bar += (sq - r) / (r * (r - 1.0));
  }
  p_bar /= n_items;

  double p_e = 0.0;
  for (double share : category_share) {
    double p = share / (n_items * r);
    p_e += p * p;
  }

  if (p_e >= 1.0) {
    if (p_bar >= 1.0) return 1.0;  // all raters, all items, one category
    throw DegenerateError("fleiss_kappa undefined: chance agreement is 1 but observed is not");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

// sample Pearson correlation coefficient
inline double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatchError("pearson_corr inputs differ in length");
  if (x.size() < 2) throw LengthMismatchError("pearson_corr requires at least 2 points");
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVarianceError("pearson_corr input vector is constant");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace eif
