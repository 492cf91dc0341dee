#include "satsched/intent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "satsched/llm_client.hpp"

namespace satsched {

const char* intent_category_name(IntentCategory c) {
  switch (c) {
    case IntentCategory::throughput: return "throughput";
    case IntentCategory::emergency: return "emergency";
    case IntentCategory::fairness: return "fairness";
    case IntentCategory::energy: return "energy";
    case IntentCategory::mixed: return "mixed";
  }
  return "mixed";
}

std::optional<IntentCategory> intent_category_from_string(const std::string& name) {
  for (auto c : {IntentCategory::throughput, IntentCategory::emergency, IntentCategory::fairness,
                 IntentCategory::energy, IntentCategory::mixed}) {
    if (name == intent_category_name(c)) return c;
  }
  return std::nullopt;
}

ObjectiveProfile default_profile(IntentCategory c) {
  ObjectiveProfile p;
  p.category = c;
  switch (c) {
    case IntentCategory::throughput:
      p.weight_bias = {1.5, 1.0, 1.0, 1.0, 1.0};
      p.description = "push aggregate rate";
      break;
    case IntentCategory::emergency:
      p.weight_bias = {1.0, 2.0, 1.0, 1.0, 1.5};
      p.description = "suppress outages, keep coverage fair";
      break;
    case IntentCategory::fairness:
      p.weight_bias = {1.0, 1.0, 1.0, 1.0, 2.0};
      p.description = "equalize served rates";
      break;
    case IntentCategory::energy:
      p.weight_bias = {1.0, 1.0, 2.0, 1.0, 1.0};
      p.description = "avoid beam reconfiguration";
      break;
    case IntentCategory::mixed:
      p.weight_bias = {1.0, 1.0, 1.0, 1.0, 1.0};
      p.description = "balanced default";
      break;
  }
  return p;
}

namespace {
bool contains_any(const std::string& text, std::initializer_list<const char*> words) {
  for (const char* w : words) {
    if (text.find(w) != std::string::npos) return true;
  }
  return false;
}
}  // namespace

ObjectiveProfile parse_intent_rule(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (contains_any(lower, {"throughput", "rate"})) {
    return default_profile(IntentCategory::throughput);
  }
  if (contains_any(lower, {"emergency", "disaster", "outage"})) {
    return default_profile(IntentCategory::emergency);
  }
  if (contains_any(lower, {"fair", "equal"})) return default_profile(IntentCategory::fairness);
  if (contains_any(lower, {"energy", "power", "switch"})) {
    return default_profile(IntentCategory::energy);
  }
  return default_profile(IntentCategory::mixed);
}

ObjectiveProfile parse_intent_llm(const std::string& text, LlmClient& client, EventLog* log) {
  const std::string prompt =
      "Operator command: \"" + text +
      "\"\nMap it to one objective profile. Reply with JSON only: "
      "{\"profile\": \"throughput|emergency|fairness|energy|mixed\", "
      "\"weight_bias\": [sum_rate, outage, switching, queue, fairness]} "
      "with multiplicative biases in [0.5, 2.0].";
  const auto completion = client.complete("", prompt);
  if (completion.ok) {
    // The reply may wrap the JSON object in prose; parse the first braced span.
    const auto open = completion.content.find('{');
    const auto close = completion.content.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open) {
      auto j = nlohmann::json::parse(completion.content.substr(open, close - open + 1), nullptr,
                                     false);
      if (!j.is_discarded() && j.contains("profile") && j["profile"].is_string()) {
        const auto category = intent_category_from_string(j["profile"].get<std::string>());
        if (category) {
          ObjectiveProfile p = default_profile(*category);
          if (j.contains("weight_bias") && j["weight_bias"].is_array() &&
              j["weight_bias"].size() == kNumWeights) {
            bool ok = true;
            WeightVector bias;
            for (std::size_t i = 0; i < kNumWeights; ++i) {
              if (!j["weight_bias"][i].is_number()) {
                ok = false;
                break;
              }
              bias[i] = j["weight_bias"][i].get<double>();
              if (!std::isfinite(bias[i]) || bias[i] < 0.0) ok = false;
            }
            if (ok) p.weight_bias = bias;
          }
          return p;
        }
      }
    }
  }
  if (log) log->add(0, "intent_parse_fallback", "{\"command\":\"" + text + "\"}");
  return parse_intent_rule(text);
}

double satisfaction(const ObjectiveProfile& profile, const PhaseMetrics& metrics,
                    const SatisfactionConfig& cfg) {
  if (metrics.steps == 0) throw std::invalid_argument("satisfaction: empty phase window");
  auto clip01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const double throughput = clip01(metrics.mean_rate_mbps / cfg.reference_rate_mbps);
  const double emergency = clip01(1.0 - metrics.mean_outage_rate);
  const double fair = clip01(metrics.mean_jain);
  const double energy = clip01(1.0 - metrics.mean_switching / cfg.max_switching_cost);
  switch (profile.category) {
    case IntentCategory::throughput: return throughput;
    case IntentCategory::emergency: return emergency;
    case IntentCategory::fairness: return fair;
    case IntentCategory::energy: return energy;
    case IntentCategory::mixed: return (throughput + emergency + fair + energy) / 4.0;
  }
  return 0.0;
}

std::vector<IntentPhase> parse_intent_schedule(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_array()) throw std::invalid_argument("intent schedule must be a JSON array");
  std::vector<IntentPhase> phases;
  std::uint64_t prev = 0;
  for (const auto& item : j) {
    IntentPhase p;
    p.start_step = item.at("start_step").get<std::uint64_t>();
    p.command_text = item.at("command").get<std::string>();
    if (!phases.empty() && p.start_step <= prev) {
      throw std::invalid_argument("intent schedule start_steps must be strictly increasing");
    }
    prev = p.start_step;
    p.profile = parse_intent_rule(p.command_text);
    phases.push_back(std::move(p));
  }
  return phases;
}

std::vector<IntentPhase> load_intent_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read intent schedule: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_intent_schedule(ss.str());
}

std::vector<IntentPhase> default_intent_schedule(std::uint64_t total_steps) {
  const std::uint64_t quarter = std::max<std::uint64_t>(1, total_steps / 4);
  const char* commands[4] = {"maximize throughput", "emergency response", "fairness priority",
                             "energy saving"};
  std::vector<IntentPhase> phases;
  for (std::uint64_t i = 0; i < 4; ++i) {
    IntentPhase p;
    p.start_step = i * quarter;
    p.command_text = commands[i];
    p.profile = parse_intent_rule(p.command_text);
    phases.push_back(std::move(p));
  }
  return phases;
}

IntentBiasArchitect::IntentBiasArchitect(std::unique_ptr<Architect> inner,
                                         std::vector<IntentPhase> phases)
    : inner_(std::move(inner)), phases_(std::move(phases)) {
  if (phases_.empty()) throw std::invalid_argument("intent schedule must be non-empty");
  for (std::size_t i = 1; i < phases_.size(); ++i) {
    if (phases_[i].start_step <= phases_[i - 1].start_step) {
      throw std::invalid_argument("intent phases must have strictly increasing start_steps");
    }
  }
}

const IntentPhase& IntentBiasArchitect::phase_at(std::uint64_t step) const {
  const IntentPhase* current = &phases_.front();
  for (const auto& p : phases_) {
    if (p.start_step <= step) current = &p;
  }
  return *current;
}

WeightVector IntentBiasArchitect::propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) {
  const WeightVector tactical = inner_->propose(kpi, step, rng);
  const WeightVector& bias = phase_at(step).profile.weight_bias;
  WeightVector out;
  for (std::size_t i = 0; i < kNumWeights; ++i) out[i] = tactical[i] * bias[i];
  return clamp_weights(out);
}

}  // namespace satsched
