#include "sbl/config.hpp"

#include <fstream>
#include <sstream>

#include "sbl/sphere.hpp"

namespace sbl {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at config line " + std::to_string(lineno));
    if (cfg.kv_.count(key)) throw ConfigError("duplicate key '" + key + "'");
    cfg.kv_[key] = val;
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

double ExperimentConfig::get_double(const std::string& key, double fallback) {
  consumed_.insert(key);
  double v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) {
    try {
      v = std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not a number: " + it->second);
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  resolved_[key] = os.str();
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) {
  consumed_.insert(key);
  int v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) {
    try {
      v = std::stoi(it->second);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not an integer: " + it->second);
    }
  }
  resolved_[key] = std::to_string(v);
  return v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) {
  consumed_.insert(key);
  std::uint64_t v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) {
    try {
      v = std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' is not an unsigned integer: " + it->second);
    }
  }
  resolved_[key] = std::to_string(v);
  return v;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) {
  consumed_.insert(key);
  std::string v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) v = it->second;
  resolved_[key] = v;
  return v;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) {
  consumed_.insert(key);
  bool v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) {
    if (it->second == "true" || it->second == "1")
      v = true;
    else if (it->second == "false" || it->second == "0")
      v = false;
    else
      throw ConfigError("key '" + key + "' is not a bool: " + it->second);
  }
  resolved_[key] = v ? "true" : "false";
  return v;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               const std::vector<double>& fallback) {
  consumed_.insert(key);
  std::vector<double> v = fallback;
  if (auto it = kv_.find(key); it != kv_.end()) {
    v.clear();
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        v.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a bad list entry: " + tok);
      }
    }
  }
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  resolved_[key] = os.str();
  return v;
}

void ExperimentConfig::finalize() const {
  std::string unknown;
  for (const auto& [k, v] : kv_)
    if (!consumed_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

void ExperimentConfig::note_resolved(const std::string& key, const std::string& value) {
  resolved_[key] = value;
}

void ExperimentConfig::write_resolved(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write resolved config " + path);
  for (const auto& [k, v] : resolved_) f << k << " = " << v << '\n';
}

std::uint64_t ExperimentConfig::content_hash() const {
  std::uint64_t h = fnv1a(nullptr, 0);
  for (const auto& [k, v] : resolved_) {
    h = fnv1a(k.data(), k.size(), h);
    h = fnv1a("=", 1, h);
    h = fnv1a(v.data(), v.size(), h);
  }
  return h;
}

void RunManifest::add_input(const std::string& path) { inputs_.emplace_back(path, hash_file(path)); }

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write manifest " + path);
  f << "config_hash " << config_hash_ << '\n';
  f << "wall_seconds " << wall_seconds_ << '\n';
  for (const auto& [p, h] : inputs_) f << "input " << h << ' ' << p << '\n';
  for (const auto& p : outputs_) f << "output " << hash_file(p) << ' ' << p << '\n';
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot hash missing file " + path);
  char buf[65536];
  std::uint64_t h = fnv1a(nullptr, 0);
  while (f) {
    f.read(buf, sizeof buf);
    h = fnv1a(buf, static_cast<std::size_t>(f.gcount()), h);
  }
  return h;
}

std::vector<std::string> verify_manifest(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw ConfigError("cannot open manifest " + manifest_path);
  std::vector<std::string> bad;
  std::string kind;
  while (f >> kind) {
    if (kind == "output" || kind == "input") {
      std::uint64_t h;
      std::string path;
      f >> h;
      std::getline(f, path);
      if (!path.empty() && path[0] == ' ') path = path.substr(1);
      try {
        if (hash_file(path) != h) bad.push_back(path);
      } catch (const std::exception&) {
        bad.push_back(path);
      }
    } else {
      std::string rest;
      std::getline(f, rest);
    }
  }
  return bad;
}

}  // namespace sbl
