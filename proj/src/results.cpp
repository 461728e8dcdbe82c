#include "tfde/results.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "tfde/error.hpp"

namespace tfde {

bool ResultTable::partial() const {
  for (const auto& r : rows)
    if (r.flagged) return true;
  return false;
}

void ResultTable::fill_rates(const std::string& metric, bool growth) {
  ResultRow* prev = nullptr;
  for (auto& r : rows) {
    if (r.metric != metric) continue;
    if (prev && std::isfinite(prev->value) && std::isfinite(r.value) && prev->value > 0.0 && r.value > 0.0) {
      const double lr = std::log2(prev->value / r.value) / (r.J - prev->J);
      r.rate = growth ? -lr : lr;
    }
    prev = &r;
  }
}

const ResultRow* ResultTable::find(int J, const std::string& metric) const {
  for (const auto& r : rows)
    if (r.J == J && r.metric == metric) return &r;
  return nullptr;
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

nlohmann::json jnum(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double from_jnum(const nlohmann::json& j) { return j.is_null() ? kMissing : j.get<double>(); }

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& r : table.rows) {
    os << r.J << "," << r.metric << "," << num(r.value) << "," << num(r.rate) << ","
       << (r.iterations >= 0 ? std::to_string(r.iterations) : "") << "," << num(r.cond_before) << ","
       << num(r.cond_after) << ",\n";
  }
  return os.str();
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"J", r.J},
                    {"metric", r.metric},
                    {"value", jnum(r.value)},
                    {"rate", jnum(r.rate)},
                    {"iterations", r.iterations >= 0 ? nlohmann::json(r.iterations) : nlohmann::json(nullptr)},
                    {"cond_before", jnum(r.cond_before)},
                    {"cond_after", jnum(r.cond_after)},
                    {"flagged", r.flagged}});
  }
  return {{"example", table.example}, {"config", table.config}, {"rows", rows}, {"notes", table.notes}};
}

ResultTable from_json(const nlohmann::json& j) {
  ResultTable t;
  try {
    t.example = j.at("example").get<std::string>();
    t.config = j.value("config", nlohmann::json::object());
    for (const auto& n : j.value("notes", nlohmann::json::array())) t.notes.push_back(n.get<std::string>());
    for (const auto& r : j.at("rows")) {
      ResultRow row;
      row.J = r.at("J").get<int>();
      row.metric = r.at("metric").get<std::string>();
      row.value = from_jnum(r.at("value"));
      row.rate = from_jnum(r.at("rate"));
      row.iterations = r.at("iterations").is_null() ? -1 : r.at("iterations").get<int>();
      row.cond_before = from_jnum(r.at("cond_before"));
      row.cond_after = from_jnum(r.at("cond_after"));
      row.flagged = r.value("flagged", false);
      t.rows.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed result document: ") + e.what());
  }
  return t;
}

nlohmann::json metadata(const ResultTable& table, const std::string& version) {
  nlohmann::json wall = nlohmann::json::array();
  for (const auto& r : table.rows) wall.push_back({{"J", r.J}, {"metric", r.metric}, {"wall_ms", jnum(r.wall_ms)}});
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"example", table.example}, {"version", version}, {"timestamp", ts}, {"config", table.config}, {"wall_ms", wall}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  f << content;
  if (!f) throw Error(ErrorKind::IoFailure, "write to " + path + " failed");
}

}  // namespace tfde
