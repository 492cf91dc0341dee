#include "satsched/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "satsched/events.hpp"

namespace satsched {

AnchorStore::AnchorStore(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("anchor sigma must be > 0");
}

void AnchorStore::insert(AnchorEntry entry) {
  validate_weights(entry.weights);
  for (double v : entry.kpi) {
    if (!std::isfinite(v)) throw std::invalid_argument("anchor kpi must be finite");
  }
  if (!(entry.performance_mbps >= 0.0)) {
    throw std::invalid_argument("anchor performance must be >= 0");
  }
  p_max_ = std::max(p_max_, entry.performance_mbps);
  entries_.push_back(std::move(entry));
}

bool AnchorStore::upsert(AnchorEntry entry) {
  constexpr double kTol = 1e-6;
  for (auto& existing : entries_) {
    bool same = true;
    for (std::size_t i = 0; i < 5 && same; ++i) {
      if (std::abs(existing.kpi[i] - entry.kpi[i]) > kTol) same = false;
    }
    for (std::size_t i = 0; i < kNumWeights && same; ++i) {
      if (std::abs(existing.weights[i] - entry.weights[i]) > kTol) same = false;
    }
    if (same) {
      if (entry.performance_mbps > existing.performance_mbps) {
        existing = std::move(entry);
        p_max_ = std::max(p_max_, existing.performance_mbps);
        return true;
      }
      return false;
    }
  }
  insert(std::move(entry));
  return true;
}

double AnchorStore::score(const std::array<double, 5>& query_kpi,
                          const AnchorEntry& entry) const {
  if (entries_.empty()) throw std::logic_error("anchor score on empty store");
  if (!(p_max_ > 0.0)) throw std::domain_error("anchor score: p_max is zero");
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double d = query_kpi[i] - entry.kpi[i];
    dist_sq += d * d;
  }
  return std::exp(-dist_sq / (2.0 * sigma_ * sigma_)) * entry.performance_mbps / p_max_;
}

std::vector<AnchorStore::Ranked> AnchorStore::top_k(const std::array<double, 5>& query_kpi,
                                                    std::size_t k) const {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  if (entries_.empty()) return {};
  std::vector<Ranked> ranked;
  ranked.reserve(entries_.size());
  for (const auto& e : entries_) ranked.push_back({&e, score(query_kpi, e)});
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entry->performance_mbps > b.entry->performance_mbps;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

namespace {
nlohmann::json entry_to_json(const AnchorEntry& e) {
  nlohmann::json j;
  j["kpi"] = e.kpi;
  j["weights"] = {e.weights.sum_rate, e.weights.outage, e.weights.switching, e.weights.queue,
                  e.weights.fairness};
  j["performance_mbps"] = e.performance_mbps;
  j["source"] = e.source;
  return j;
}

AnchorEntry entry_from_json(const nlohmann::json& j) {
  AnchorEntry e;
  e.kpi = j.at("kpi").get<std::array<double, 5>>();
  const auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != kNumWeights) throw std::invalid_argument("anchor weights must have 5 entries");
  for (std::size_t i = 0; i < kNumWeights; ++i) e.weights[i] = w[i];
  e.performance_mbps = j.at("performance_mbps").get<double>();
  e.source = j.value("source", "");
  return e;
}
}  // namespace

std::string AnchorStore::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : entries_) out << entry_to_json(e).dump() << "\n";
  return out.str();
}

AnchorStore AnchorStore::from_jsonl(const std::string& text, double sigma) {
  AnchorStore store(sigma);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    store.insert(entry_from_json(nlohmann::json::parse(line)));
  }
  return store;
}

void AnchorStore::save_jsonl(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write anchor store: " + path);
  f << to_jsonl();
}

AnchorStore AnchorStore::load_jsonl(const std::string& path, double sigma) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read anchor store: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_jsonl(ss.str(), sigma);
}

std::size_t ingest_records(AnchorStore& store, const std::vector<AnchorEntry>& records,
                           EventLog* log) {
  std::size_t applied = 0;
  for (const auto& rec : records) {
    bool ok = rec.performance_mbps >= 0.0 && std::isfinite(rec.performance_mbps);
    for (double v : rec.kpi) {
      if (!std::isfinite(v)) ok = false;
    }
    for (std::size_t i = 0; i < kNumWeights && ok; ++i) {
      if (!std::isfinite(rec.weights[i]) || rec.weights[i] < 0.0) ok = false;
    }
    if (!ok) {
      if (log) log->add(0, "anchor_record_skipped", "{\"source\":\"" + rec.source + "\"}");
      continue;
    }
    if (store.upsert(rec)) ++applied;
  }
  return applied;
}

}  // namespace satsched
