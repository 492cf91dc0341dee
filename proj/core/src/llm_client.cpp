#include "satsched/llm_client.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace satsched {

namespace {

struct ParsedUrl {
  std::string scheme_host;  // "http://host:port"
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::string& api_key,
                    const std::string& json_body, int timeout_seconds) override {
    const auto parsed = split_url(url);
    httplib::Client client(parsed.scheme_host);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = client.Post(parsed.path, headers, json_body, "application/json");
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
  }
};

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

LlmClient::LlmClient(LlmClientConfig cfg, std::unique_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {}

LlmClient::Completion LlmClient::complete(const std::string& system_prompt,
                                          const std::string& user_prompt) {
  nlohmann::json req;
  req["model"] = cfg_.model;
  req["temperature"] = cfg_.temperature;
  req["messages"] = nlohmann::json::array();
  if (!system_prompt.empty()) {
    req["messages"].push_back({{"role", "system"}, {"content", system_prompt}});
  }
  req["messages"].push_back({{"role", "user"}, {"content", user_prompt}});

  const char* key = nullptr;
  if (!cfg_.api_key_env.empty()) key = std::getenv(cfg_.api_key_env.c_str());

  const HttpResponse res = transport_->post(cfg_.endpoint, key ? key : "", req.dump(),
                                            cfg_.timeout_seconds);
  if (res.status == 0) return {false, "", "http_error"};
  if (res.status != 200) return {false, res.body, "http_error"};

  auto body = nlohmann::json::parse(res.body, nullptr, false);
  if (body.is_discarded()) return {false, "", "malformed_json"};
  try {
    return {true, body.at("choices").at(0).at("message").at("content").get<std::string>(), ""};
  } catch (const nlohmann::json::exception&) {
    return {false, "", "malformed_json"};
  }
}

std::optional<std::array<double, 5>> extract_weight_array(const std::string& text) {
  for (std::size_t pos = text.find('['); pos != std::string::npos;
       pos = text.find('[', pos + 1)) {
    const auto close = text.find(']', pos);
    if (close == std::string::npos) break;
    auto candidate = nlohmann::json::parse(text.substr(pos, close - pos + 1), nullptr, false);
    if (candidate.is_discarded() || !candidate.is_array() || candidate.size() != 5) continue;
    std::array<double, 5> out{};
    bool ok = true;
    for (std::size_t i = 0; i < 5 && ok; ++i) {
      if (!candidate[i].is_number()) ok = false;
      else out[i] = candidate[i].get<double>();
    }
    if (ok) return out;
  }
  return std::nullopt;
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots) {
  std::string out = tmpl;
  for (std::size_t pos = out.find("{{"); pos != std::string::npos; pos = out.find("{{", pos)) {
    const auto end = out.find("}}", pos);
    if (end == std::string::npos) break;
    const std::string name = out.substr(pos + 2, end - pos - 2);
    const auto it = slots.find(name);
    const std::string value = it == slots.end() ? "" : it->second;
    out.replace(pos, end - pos + 2, value);
    pos += value.size();
  }
  return out;
}

std::string default_architect_template() {
  return
      "You tune the reward weights of a multi-beam satellite bandwidth scheduler.\n"
      "Current network KPIs:\n{{KPI_BLOCK}}\n"
      "Current weights [sum_rate, outage, switching, queue, fairness]: {{CURRENT_WEIGHTS}}\n"
      "{{ANCHOR_BLOCK}}"
      "Reply with only a JSON array of five non-negative numbers in "
      "[sum_rate, outage, switching, queue, fairness] order.\n";
}

LlmWeightArchitect::LlmWeightArchitect(LlmClientConfig cfg,
                                       std::unique_ptr<HttpTransport> transport,
                                       WeightVector initial, const AnchorStore* anchors,
                                       int anchor_k, EventLog* log, FeatureScaler scaler)
    : client_(cfg, std::move(transport)), current_(clamp_weights(initial)), anchors_(anchors),
      anchor_k_(anchor_k), log_(log), scaler_(scaler) {
  if (!cfg.prompt_template_path.empty()) {
    std::ifstream f(cfg.prompt_template_path);
    if (!f) throw std::runtime_error("cannot read prompt template: " + cfg.prompt_template_path);
    std::stringstream ss;
    ss << f.rdbuf();
    template_text_ = ss.str();
  } else {
    template_text_ = default_architect_template();
  }
}

std::string LlmWeightArchitect::build_prompt(const KpiSnapshot& kpi) const {
  std::ostringstream kpi_block;
  kpi_block << "mean_demand_mbps: " << kpi.mean_demand_mbps << "\n"
            << "peak_demand_mbps: " << kpi.peak_demand_mbps << "\n"
            << "gini: " << kpi.gini << "\n"
            << "outage_rate: " << kpi.outage_rate << "\n"
            << "demand_trend: " << kpi.demand_trend << "\n";

  std::ostringstream anchor_block;
  if (anchors_ && anchors_->size() > 0) {
    const auto ranked = anchors_->top_k(scaler_.normalize(kpi),
                                        static_cast<std::size_t>(anchor_k_));
    if (!ranked.empty()) {
      anchor_block << "Verified historical anchors (weights -> achieved Mbps):\n";
      for (const auto& r : ranked) {
        anchor_block << "  " << to_json_array(r.entry->weights) << " -> "
                     << r.entry->performance_mbps << " Mbps\n";
      }
    }
  }

  return render_template(template_text_, {{"KPI_BLOCK", kpi_block.str()},
                                          {"CURRENT_WEIGHTS", to_json_array(current_)},
                                          {"ANCHOR_BLOCK", anchor_block.str()}});
}

WeightVector LlmWeightArchitect::propose(const KpiSnapshot& kpi, std::uint64_t step, Rng&) {
  const std::string prompt = build_prompt(kpi);
  const int attempts = 1 + client_.config().max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const auto completion = client_.complete("", prompt);
    if (!completion.ok) {
      if (log_) log_->add(step, "llm_" + completion.error_kind);
      continue;
    }
    const auto parsed = extract_weight_array(completion.content);
    if (!parsed) {
      if (log_) log_->add(step, "llm_malformed_json");
      continue;
    }
    WeightVector w;
    bool in_range = true;
    for (std::size_t i = 0; i < kNumWeights; ++i) {
      w[i] = (*parsed)[i];
      if (!std::isfinite(w[i]) || w[i] < 0.0) in_range = false;
    }
    if (!in_range) {
      if (log_) log_->add(step, "llm_out_of_range", to_json_array(w));
      continue;
    }
    current_ = clamp_weights(relative_clamp(w, current_));
    return current_;
  }
  if (log_) log_->add(step, "llm_fallback");
  return current_;
}

}  // namespace satsched
