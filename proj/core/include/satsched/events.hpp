#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace satsched {

// Append-only run event log, persisted as JSONL. Kinds in use:
// cusum_alarm, switch_applied, cooldown_suppressed, throttle_deferred,
// llm_http_error, llm_malformed_json, llm_out_of_range, llm_fallback,
// scaler_out_of_range, intent_parse_fallback.
struct Event {
  std::uint64_t step = 0;
  std::string kind;
  std::string detail;  // free-form JSON fragment or plain text
};

class EventLog {
 public:
  void add(std::uint64_t step, std::string kind, std::string detail = "");
  const std::vector<Event>& events() const { return events_; }
  std::size_t count(const std::string& kind) const;
  void write_jsonl(const std::string& path) const;
  std::string to_jsonl() const;

 private:
  std::vector<Event> events_;
};

}  // namespace satsched
