#include "ampa/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ampa {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  const std::string canon = config.dump();
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a64(canon));
  return buf;
}

std::string version_string() {
#ifdef AMPA_VERSION
  return AMPA_VERSION;
#else
  return "v0-unknown";
#endif
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::string>& types,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) f << ',';
    f << columns[i];
  }
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) f << ',';
      f << row[i];
    }
    f << '\n';
  }
  nlohmann::json schema;
  schema["schema_version"] = 1;
  schema["delimiter"] = ",";
  schema["columns"] = columns;
  schema["types"] = types;
  std::ofstream s(path + ".schema.json");
  if (!s) throw std::runtime_error("write_csv: cannot open schema sidecar for " + path);
  s << schema.dump(2) << '\n';
}

void write_json_rows(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json o;
    for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) o[columns[i]] = row[i];
    j.push_back(o);
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_json_rows: cannot open " + path);
  f << j.dump(2) << '\n';
}

void write_summary(const std::string& path, const nlohmann::json& config,
                   const StageClock& clock, const nlohmann::json& extra) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  j["version"] = version_string();
  nlohmann::json st;
  for (const auto& [name, sec] : clock.stages) st[name] = sec;
  j["wall_clock_seconds"] = st;
  j["results"] = extra;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_summary: cannot open " + path);
  f << j.dump(2) << '\n';
}

} // namespace ampa
