#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace jpec {

inline constexpr const char* kEngineVersion = "1.0.0";

std::string sha256_file(const std::filesystem::path& path);

// Record of one CLI invocation, written as manifest.json next to the outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::vector<std::string> warnings;
  std::vector<std::string> flags;
  double wall_clock_seconds = 0.0;
  std::string engine_version = kEngineVersion;

  void add_input(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// Outputs are written to sibling temporary paths and renamed into place only
// by commit(); anything still staged is deleted on destruction, so a failed run
// leaves no partial primary outputs behind.
class StagedOutputs {
 public:
  StagedOutputs() = default;
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;
  ~StagedOutputs();

  // Temporary path to write instead of `final_path`.
  std::filesystem::path stage(const std::filesystem::path& final_path);
  // Renames every staged file and records its digest in `manifest`.
  void commit(RunManifest& manifest);

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

}  // namespace jpec
