#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ampa {

std::string fmt_g17(double v);

uint64_t fnv1a64(std::string_view s);

// FNV-1a over the canonical (sorted-key) JSON dump, hex string
std::string config_hash(const nlohmann::json& config);

std::string version_string();

// writes the table plus a sidecar <path>.schema.json descriptor
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::string>& types,
               const std::vector<std::vector<std::string>>& rows);

void write_json_rows(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows);

struct StageClock {
  std::vector<std::pair<std::string, double>> stages;
  void add(const std::string& name, double seconds) { stages.emplace_back(name, seconds); }
};

void write_summary(const std::string& path, const nlohmann::json& config,
                   const StageClock& clock, const nlohmann::json& extra);

} // namespace ampa
