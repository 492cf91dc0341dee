#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace satsched {

struct RewardTerms;

inline constexpr double kWeightMin = 0.01;
inline constexpr double kWeightMax = 2.0;
inline constexpr std::size_t kNumWeights = 5;

// Canonical component order used everywhere, including JSON: [w_r, w_o, w_s, w_q, w_f].
inline constexpr std::array<const char*, kNumWeights> kWeightNames = {
    "sum_rate", "outage", "switching", "queue", "fairness"};

// The five coefficients of the composite reward. All components must be
// non-negative: the environment subtracts its penalty terms internally, so a
// negative weight would silently turn a penalty into a bonus.
struct WeightVector {
  double sum_rate = 1.0;   // w_r
  double outage = 1.0;     // w_o
  double switching = 0.3;  // w_s
  double queue = 0.5;      // w_q
  double fairness = 0.8;   // w_f

  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;

  bool operator==(const WeightVector&) const = default;
};

// Throws std::invalid_argument naming every offending component if any entry
// is negative or non-finite.
void validate_weights(const WeightVector& w);

// w_r*R - w_o*O - w_s*S - w_q*Q + w_f*F. Rejects negative weights.
double compose(const WeightVector& w, const RewardTerms& t);

// Clip every component into [0.01, 2.0]. NaN input throws.
WeightVector clamp_weights(const WeightVector& w);

// Clip each proposed component into [current*(1-pct), current*(1+pct)], then
// apply the absolute clamp.
WeightVector relative_clamp(const WeightVector& proposed, const WeightVector& current,
                            double pct = 0.30);

double linf_distance(const WeightVector& a, const WeightVector& b);

std::string to_json_array(const WeightVector& w);
WeightVector weight_vector_from_json(const std::string& json_array_text);

}  // namespace satsched
