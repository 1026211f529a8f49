#pragma once

// Run manifest written next to every command's outputs. Replaying `argv`
// with a different --out reproduces the numeric outputs bit-exactly.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <string>
#include <vector>

#include "stochvar/io/csv.hpp"
#include "stochvar/io/json.hpp"

namespace stochvar::io {

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;        // full argument vector, program name excluded
  json params = json::object();         // resolved parameter set, defaults included
  std::map<std::string, std::string> inputs;  // input path -> FNV-1a hash
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;                // UTC, ISO 8601
  std::vector<std::string> outputs;     // files written, relative to the output directory

  void add_input(const std::string& path) { inputs[path] = fnv1a_file(path); }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json to_json(const RunManifest& m) {
  json inputs = json::object();
  for (const auto& [path, hash] : m.inputs) inputs[path] = {{"fnv1a64", hash}};
  return document("manifest", {{"command", m.command},
                               {"argv", m.argv},
                               {"params", m.params},
                               {"inputs", inputs},
                               {"seed", m.seed},
                               {"version", m.version},
                               {"timestamp", m.timestamp},
                               {"outputs", m.outputs}});
}

inline RunManifest manifest_from_json(const json& j) {
  if (!j.contains("kind") || j.at("kind") != "manifest")
    throw ParseError("not a run manifest", 0);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.params = j.at("params");
  for (const auto& [path, h] : j.at("inputs").items()) m.inputs[path] = h.at("fnv1a64");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.version = j.at("version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

}  // namespace stochvar::io
