#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace tfde {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ResultRow {
  int J = 0;
  std::string metric;
  double value = kMissing;
  double rate = kMissing;
  int iterations = -1;
  double cond_before = kMissing;
  double cond_after = kMissing;
  double wall_ms = kMissing;  // sidecar only
  bool flagged = false;
};

struct ResultTable {
  std::string example;
  nlohmann::json config;
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;

  bool partial() const;
  // rate = log2(value_{J-1} / value_J) between consecutive rows of one metric
  void fill_rates(const std::string& metric, bool growth = false);
  const ResultRow* find(int J, const std::string& metric) const;
};

inline const char* kCsvHeader = "J,metric,value,rate,iterations,cond_before,cond_after,wall_ms";

// Deterministic outputs: timing lives only in the metadata sidecar.
std::string to_csv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table);
ResultTable from_json(const nlohmann::json& j);
nlohmann::json metadata(const ResultTable& table, const std::string& version);

void write_file(const std::string& path, const std::string& content);

}  // namespace tfde
