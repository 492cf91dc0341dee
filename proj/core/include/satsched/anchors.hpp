#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "satsched/reward.hpp"

namespace satsched {

// A verified (KPI, weights, performance) tuple. KPI vectors are stored
// normalized with the same scaler the MLP architect uses.
struct AnchorEntry {
  std::array<double, 5> kpi{};
  WeightVector weights;
  double performance_mbps = 0.0;
  std::string source;
};

// Exact-scan store; retrieval is RBF similarity weighted by the verified
// outcome: exp(-|kpi_q - kpi_i|^2 / 2 sigma^2) * p_i / p_max.
class AnchorStore {
 public:
  explicit AnchorStore(double sigma = 0.5);

  void insert(AnchorEntry entry);
  // Entries whose kpi and weights both match an existing one within 1e-6 are
  // merged, keeping the higher performance.
  bool upsert(AnchorEntry entry);

  double score(const std::array<double, 5>& query_kpi, const AnchorEntry& entry) const;

  struct Ranked {
    const AnchorEntry* entry;
    double score;
  };
  // Descending score; ties broken by higher performance, then insertion order.
  std::vector<Ranked> top_k(const std::array<double, 5>& query_kpi, std::size_t k) const;

  const std::vector<AnchorEntry>& entries() const { return entries_; }
  double sigma() const { return sigma_; }
  double p_max() const { return p_max_; }
  std::size_t size() const { return entries_.size(); }

  void save_jsonl(const std::string& path) const;
  static AnchorStore load_jsonl(const std::string& path, double sigma = 0.5);
  std::string to_jsonl() const;
  static AnchorStore from_jsonl(const std::string& text, double sigma = 0.5);

 private:
  double sigma_;
  double p_max_ = 0.0;
  std::vector<AnchorEntry> entries_;
};

class EventLog;

// Batch ingestion of verified probe outcomes. Malformed records (non-finite
// KPI/weights, negative performance) are skipped with a log event; duplicates
// keep the higher performance. Returns the number of records applied.
std::size_t ingest_records(AnchorStore& store, const std::vector<AnchorEntry>& records,
                           EventLog* log = nullptr);

}  // namespace satsched
