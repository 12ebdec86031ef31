#include "brownray/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace brownray {

EmpiricalCdf::EmpiricalCdf(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty())
    throw std::invalid_argument("empirical cdf needs a nonempty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(const SamplePathBatch& batch, std::size_t at_index) {
  if (at_index >= static_cast<std::size_t>(batch.values.cols()))
    throw std::invalid_argument("grid index out of range");
  if (batch.values.rows() == 0)
    throw std::invalid_argument("empirical cdf needs at least one path");
  std::vector<double> col(static_cast<std::size_t>(batch.values.rows()));
  for (Eigen::Index p = 0; p < batch.values.rows(); ++p)
    col[static_cast<std::size_t>(p)] =
        batch.values(p, static_cast<Eigen::Index>(at_index));
  return EmpiricalCdf(std::move(col));
}

double ks_distance(const EmpiricalCdf& empirical,
                   const std::function<double(double)>& analytic_cdf) {
  const auto& xs = empirical.sorted();
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = analytic_cdf(xs[i]);
    const double hi = static_cast<double>(i + 1) / n - f;  // F_n(x_i) - F
    const double lo = f - static_cast<double>(i) / n;      // F - F_n(x_i^-)
    worst = std::max(worst, std::max(hi, lo));
  }
  return worst;
}

}  // namespace brownray
