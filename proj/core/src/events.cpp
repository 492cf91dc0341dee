#include "satsched/events.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace satsched {

void EventLog::add(std::uint64_t step, std::string kind, std::string detail) {
  events_.push_back({step, std::move(kind), std::move(detail)});
}

std::size_t EventLog::count(const std::string& kind) const {
  std::size_t n = 0;
  for (const auto& e : events_) {
    if (e.kind == kind) ++n;
  }
  return n;
}

std::string EventLog::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : events_) {
    nlohmann::json j;
    j["step"] = e.step;
    j["kind"] = e.kind;
    if (!e.detail.empty()) {
      auto parsed = nlohmann::json::parse(e.detail, nullptr, false);
      j["detail"] = parsed.is_discarded() ? nlohmann::json(e.detail) : parsed;
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

void EventLog::write_jsonl(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open event log for writing: " + path);
  f << to_jsonl();
}

}  // namespace satsched
