#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specbench/clip_store.hpp"

namespace specbench {

inline constexpr std::string_view kToolVersion = "0.3.0";

enum class Provenance { Default, User, Derived };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

struct ManifestEntry {
  std::string name;
  nlohmann::json value;
  Provenance provenance = Provenance::Default;
  std::string unit;

  bool operator==(const ManifestEntry&) const = default;
};

/// One analysed clip: identity, provenance within its source file, and digest.
struct InputDigest {
  std::string clip_id;
  std::string source_path;
  std::string group_key;
  std::string label;
  int sample_rate_hz = 0;
  std::size_t n_samples = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;
  /// Hex SHA-256 of the clip's samples as little-endian IEEE doubles.
  std::string sha256;

  bool operator==(const InputDigest&) const = default;
};

struct ScopedReport {
  std::string scope;  // "clip:<id>" or "plot:<id>"
  SanitizeReport report;

  bool operator==(const ScopedReport&) const = default;
};

struct ScopedNote {
  std::string scope;
  std::string note;

  bool operator==(const ScopedNote&) const = default;
};

/// Every parameter a run consumed, once each, with where its value came from.
struct ParameterManifest {
  std::vector<ManifestEntry> entries;
  std::string tool_version = std::string(kToolVersion);
  std::vector<InputDigest> inputs;
  std::vector<ScopedReport> sanitize_reports;
  std::vector<ScopedNote> adjustments;
  std::vector<std::string> assumption_audit;

  /// Adds an entry; throws InvalidParams if the name is already recorded.
  void record(std::string name, nlohmann::json value, Provenance provenance, std::string unit = {});
  const ManifestEntry* find(std::string_view name) const;
  /// Value of an entry; throws InvalidParams when absent.
  const nlohmann::json& value(std::string_view name) const;

  bool operator==(const ParameterManifest&) const = default;
};

std::string sha256_hex(std::span<const double> samples);

}  // namespace specbench
