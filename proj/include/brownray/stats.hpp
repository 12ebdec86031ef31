#pragma once

#include <functional>
#include <vector>

#include "brownray/sampler.hpp"

namespace brownray {

// Right-continuous empirical CDF of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);

  // Fraction of the sample <= x.
  double operator()(double x) const;

  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

// Empirical CDF of one grid column of a batch.
EmpiricalCdf empirical_cdf(const SamplePathBatch& batch, std::size_t at_index);

// Two-sided Kolmogorov-Smirnov statistic sup |F_n - F| against an analytic
// CDF, evaluated at the sample points (both one-sided gaps per point).
double ks_distance(const EmpiricalCdf& empirical,
                   const std::function<double(double)>& analytic_cdf);

}  // namespace brownray
