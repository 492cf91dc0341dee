#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "satsched/anchors.hpp"
#include "satsched/architect.hpp"
#include "satsched/events.hpp"
#include "satsched/reward.hpp"

namespace satsched {

struct LlmClientConfig {
  std::string endpoint = "http://localhost:8000/v1/chat/completions";
  std::string model = "glm-4";
  std::string api_key_env = "SATSCHED_API_KEY";  // the only env-var input
  double temperature = 0.1;
  int timeout_seconds = 30;
  int max_retries = 2;
  std::string prompt_template_path;  // plain-text template with {{...}} slots

  bool operator==(const LlmClientConfig&) const = default;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string error;  // transport-level failure when status == 0
};

// Seam for tests: the live transport posts JSON over cpp-httplib, mocks
// return canned bodies.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& api_key,
                            const std::string& json_body, int timeout_seconds) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();

// Chat-completion client. complete() renders the request, posts it and
// extracts choices[0].message.content.
class LlmClient {
 public:
  LlmClient(LlmClientConfig cfg, std::unique_ptr<HttpTransport> transport);

  struct Completion {
    bool ok = false;
    std::string content;
    std::string error_kind;  // http_error | malformed_json
  };
  Completion complete(const std::string& system_prompt, const std::string& user_prompt);

  const LlmClientConfig& config() const { return cfg_; }

 private:
  LlmClientConfig cfg_;
  std::unique_ptr<HttpTransport> transport_;
};

// First 5-element numeric JSON array found in free text, if any.
std::optional<std::array<double, 5>> extract_weight_array(const std::string& text);

// Fill {{name}} slots; unmatched slots render empty.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots);

// Default prompt template used when no file is configured.
std::string default_architect_template();

// M4 live variant: prompts the chat endpooint with the KPI block plus the
// top-k anchors, parses a 5-element weight array, applies the relative clamp
// against the current weights and then the absolute clamp. After max_retries
// failed attempts it returns the current weights unchanged and logs a
// fallback event.
class LlmWeightArchitect final : public Architect {
 public:
  LlmWeightArchitect(LlmClientConfig cfg, std::unique_ptr<HttpTransport> transport,
                     WeightVector initial, const AnchorStore* anchors = nullptr,
                     int anchor_k = 3, EventLog* log = nullptr, FeatureScaler scaler = {});

  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) override;
  std::string name() const override { return "llm_api"; }

  std::string build_prompt(const KpiSnapshot& kpi) const;
  const WeightVector& current() const { return current_; }

 private:
  LlmClient client_;
  WeightVector current_;
  const AnchorStore* anchors_;
  int anchor_k_;
  EventLog* log_;
  FeatureScaler scaler_;
  std::string template_text_;
};

}  // namespace satsched
