#include "satsched/reward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "satsched/env.hpp"

namespace satsched {

double& WeightVector::operator[](std::size_t i) {
  switch (i) {
    case 0: return sum_rate;
    case 1: return outage;
    case 2: return switching;
    case 3: return queue;
    case 4: return fairness;
  }
  throw std::out_of_range("WeightVector index");
}

double WeightVector::operator[](std::size_t i) const {
  return const_cast<WeightVector&>(*this)[i];
}

void validate_weights(const WeightVector& w) {
  std::ostringstream bad;
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0) {
      bad << (bad.tellp() > 0 ? ", " : "") << kWeightNames[i] << "=" << w[i];
    }
  }
  if (bad.tellp() > 0) {
    throw std::invalid_argument("weight sign convention violated (all components must be "
                                "non-negative and finite): " +
                                bad.str());
  }
}

double compose(const WeightVector& w, const RewardTerms& t) {
  validate_weights(w);
  return w.sum_rate * t.sum_rate_norm - w.outage * t.outage_count - w.switching * t.switching -
         w.queue * t.queue_overflow + w.fairness * t.fairness;
}

WeightVector clamp_weights(const WeightVector& w) {
  WeightVector out = w;
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    if (std::isnan(out[i])) throw std::invalid_argument("NaN weight component");
    out[i] = std::clamp(out[i], kWeightMin, kWeightMax);
  }
  return out;
}

WeightVector relative_clamp(const WeightVector& proposed, const WeightVector& current,
                            double pct) {
  WeightVector out = proposed;
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    const double lo = current[i] * (1.0 - pct);
    const double hi = current[i] * (1.0 + pct);
    out[i] = std::clamp(out[i], lo, hi);
  }
  return clamp_weights(out);
}

double linf_distance(const WeightVector& a, const WeightVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < kNumWeights; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string to_json_array(const WeightVector& w) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < kNumWeights; ++i) arr.push_back(w[i]);
  return arr.dump();
}

WeightVector weight_vector_from_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array() || arr.size() != kNumWeights) {
    throw std::invalid_argument("weight vector must be a 5-element JSON array");
  }
  WeightVector w;
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    if (!arr[i].is_number()) throw std::invalid_argument("weight vector entries must be numbers");
    w[i] = arr[i].get<double>();
  }
  return w;
}

}  // namespace satsched
