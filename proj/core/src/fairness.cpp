#include "satsched/fairness.hpp"

#include <cmath>
#include <stdexcept>

namespace satsched {

double gini(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("gini: empty vector");
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0 || !std::isfinite(v)) throw std::domain_error("gini: values must be >= 0");
    sum += v;
  }
  if (sum == 0.0) return 0.0;
  double abs_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) abs_diff += std::abs(values[i] - values[j]);
  }
  const double mean = sum / static_cast<double>(n);
  return abs_diff / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mean);
}

double jain(std::span<const double> rates) {
  if (rates.empty()) throw std::domain_error("jain: empty vector");
  double sum = 0.0, sum_sq = 0.0;
  for (double r : rates) {
    sum += r;
    sum_sq += r * r;
  }
  if (sum_sq == 0.0) return 1.0;  // all-zero convention
  return (sum * sum) / (static_cast<double>(rates.size()) * sum_sq);
}

}  // namespace satsched
