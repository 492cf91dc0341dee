#pragma once

#include <span>

namespace satsched {

// Spatial Gini coefficient: sum_ij |x_i - x_j| / (2 n^2 mean). Returns 0 for
// an all-zero vector. Negative entries throw std::domain_error.
double gini(std::span<const double> values);

// Jain's fairness index (sum x)^2 / (n sum x^2), 1 for an all-zero vector.
double jain(std::span<const double> rates);

}  // namespace satsched
