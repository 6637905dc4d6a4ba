#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbh/common.hpp"
#include "bbh/concrete.hpp"
#include "bbh/equivariant.hpp"

namespace bbh {

/// Flat key/value experiment configuration.
///
/// File format: one `key = value` per line, `#` starts a comment. Keys:
///   p g c D N seed q m group type mode out check workers records
///   cap-pc-order cap-concrete-order cap-iso-order cap-tuples cap-search cap-class-group
/// `q` and `m` accept comma-separated lists.
class Config {
 public:
  static const std::vector<std::string>& known_keys();

  /// Parse a config file; throws ArgumentError naming the line or the unknown key.
  static Config parse(std::istream& in, const std::string& source = "config");
  static Config load(const std::string& path);

  /// Overrides file values; throws ArgumentError on unknown keys.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key, const std::string& fallback) const;
  std::string str(const std::string& key) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  std::vector<long long> integers(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// FNV-1a of the sorted key=value lines.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

Caps caps_from_config(const Config& cfg);

/// Involution inverting every generator of H (a GI involution).
Involution generator_inversion(const ConcreteGroup& H);

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunOutput {
  std::vector<OutputFile> files;
  nlohmann::json summary;
  bool check_passed = true;
};

/// Subcommands: qfree, enumerate-bbh, sample-bbh, moment, matrix, ff-scan, noneq-check.
const std::vector<std::string>& experiment_kinds();
RunOutput run_experiment(const std::string& kind, const Config& cfg);

/// Writes the tables, `<kind>_summary.json` and `<kind>_meta.json` (config hash,
/// version, timestamp) into cfg.out (default "."). Only the meta file varies between reruns.
void write_outputs(const std::string& kind, const Config& cfg, const RunOutput& out);

constexpr const char* kVersion = "0.1.0";

}  // namespace bbh
