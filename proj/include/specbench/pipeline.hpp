#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "specbench/audit.hpp"
#include "specbench/clip_store.hpp"
#include "specbench/export.hpp"
#include "specbench/features.hpp"
#include "specbench/manifest.hpp"
#include "specbench/session.hpp"
#include "specbench/transform_params.hpp"

namespace specbench {

enum class ExportKind { Csv, Json, Png, Html };

std::string_view to_string(ExportKind k);
/// Comma list, e.g. "csv,json,png". Throws InvalidParams.
std::vector<ExportKind> parse_export_kinds(std::string_view text);

struct RunConfig {
  std::string input_root = ".";
  std::string pattern = "*.wav";
  std::string indices = "all";
  bool use_annotations = true;
  std::vector<Method> methods = {Method::FftDual};
  TransformParams params;
  PeakConfig peaks;
  VeinConfig veins;
  int auto_select_n = kDefaultAutoSelect;
  double integer_tolerance = kDefaultIntegerTolerance;
  std::string out_dir = "specbench_out";
  std::vector<ExportKind> exports = {ExportKind::Csv, ExportKind::Json, ExportKind::Png};
  bool include_psd_db = true;
  bool include_spectrogram = true;
  std::optional<std::string> ui_bundle;
  std::uint64_t seed = 0;
  AuditContext audit;
  unsigned workers = 0;

  /// Manifest names whose value the user supplied.
  std::set<std::string> user_set;
};

/// Throws InvalidParams when a field is out of range.
void validate(const RunConfig& config);

/// One entry per configuration field, provenance user for names in user_set.
ParameterManifest config_manifest(const RunConfig& config);

/// Rebuilds the configuration a manifest describes, provenance included.
/// Throws InvalidParams when an entry is missing or malformed.
RunConfig config_from_manifest(const ParameterManifest& manifest);

struct RunFailure {
  std::string scope;  // source path or plot id
  std::string error;
};

struct AnalysisRun {
  ClipCollection collection;
  SessionSnapshot snapshot;
  std::size_t files_matched = 0;
  std::size_t files_failed = 0;
  std::vector<RunFailure> failures;
};

/// ingest -> segment -> every method per clip -> peaks, ridge, veins ->
/// auto-select -> manifest and audit. Files that fail to load and plots whose
/// transform fails are recorded in `failures` and skipped. Throws NoMatches
/// when nothing matches and InvalidParams for an invalid configuration.
AnalysisRun run_analysis(const RunConfig& config);

struct WrittenOutputs {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Writes the requested exports plus manifest.json, collection.csv and
/// clips/<id>.wav into config.out_dir.
WrittenOutputs write_outputs(const AnalysisRun& run, const RunConfig& config);

/// File name used for a clip's audio under clips/.
std::string clip_audio_filename(const std::string& clip_id);

/// Writes `bytes` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view bytes);
std::string read_text_file(const std::string& path);

}  // namespace specbench
