#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat `key = value` configuration with '#' comments. Every key must be
// consumed through a typed getter; finalize() rejects unknown keys so a
// config diff always means a behavioral diff.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);

  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback);

  // Throws ConfigError listing any key never requested by a getter.
  void finalize() const;

  // The fully-resolved view: every key touched by a getter with the value
  // actually used, written next to the run outputs.
  void note_resolved(const std::string& key, const std::string& value);
  void write_resolved(const std::string& path) const;

  std::uint64_t content_hash() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

// Run manifest: config hash, input-file content hashes, wall time, output
// files with their hashes. Re-running an identical manifest reproduces
// bit-identical CSVs; verify_manifest re-checks the recorded output hashes.
class RunManifest {
 public:
  void set_config_hash(std::uint64_t h) { config_hash_ = h; }
  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void set_wall_seconds(double s) { wall_seconds_ = s; }
  void write(const std::string& path) const;

 private:
  std::uint64_t config_hash_ = 0;
  std::vector<std::pair<std::string, std::uint64_t>> inputs_;
  std::vector<std::string> outputs_;
  double wall_seconds_ = 0.0;
};

std::uint64_t hash_file(const std::string& path);

// Returns the list of mismatched files (empty = verified).
std::vector<std::string> verify_manifest(const std::string& manifest_path);

}  // namespace sbl
