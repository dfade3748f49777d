#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specbench/session.hpp"

namespace specbench {

inline constexpr int kJsonSchemaVersion = 1;

struct JsonOptions {
  bool include_psd_db = true;
  bool include_spectrogram = true;
};

// ---------------------------------------------------------------------------
// JSON documents. Object keys are sorted and output is compact, so a plot's
// text inside the full document equals plot_json_text() of that plot.

nlohmann::json to_json(const ParameterManifest& m);
ParameterManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TransformParams& p);
TransformParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Peak& p);
Peak peak_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PlotData& plot, const JsonOptions& opts = {});
PlotData plot_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SelectionState& s);
SelectionState selection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HarmonicGraph& g, double integer_tolerance);

nlohmann::json to_json(const SessionSnapshot& s, const JsonOptions& opts = {});

/// Compact dump with '<', '>' and '&' written as \u escapes so the text can be
/// embedded verbatim in an HTML script element.
std::string dump_json(const nlohmann::json& j);

std::string export_json(const SessionSnapshot& s, const JsonOptions& opts = {});
std::string plot_json_text(const PlotData& plot, const JsonOptions& opts = {});

/// Inverse of export_json. Unknown fields are ignored; an elided psd_db is
/// recomputed from psd_linear. Throws ParseError on malformed input.
SessionSnapshot import_json(std::string_view text);

// ---------------------------------------------------------------------------
// CSV

struct CsvTables {
  /// `plot_id,clip_id,method,selection_order,freq_hz,power_linear,power_db,width_hz,prominence`
  std::string peaks;
  /// `pair_id,freq_a_hz,freq_b_hz,ratio,is_near_integer`
  std::string ratios;
};

/// Peaks: every detected, non-removed peak of every plot, with its selection
/// order when selected (blank otherwise). Ratios: one row per pair, 1-based.
CsvTables export_csv(const SessionSnapshot& s);

// ---------------------------------------------------------------------------
// HTML

struct HtmlReport {
  std::string html;
  std::vector<std::string> warnings;  // "BundleMissing: ..." when no bundle
};

/// Self-contained HTML5. The export_json text sits verbatim inside
/// <script type="application/json" id="specbench-data">. With a bundle the
/// script is inlined after it; without one, static tables are emitted.
HtmlReport export_html(const SessionSnapshot& s, const std::optional<std::string>& ui_bundle_js,
                       const JsonOptions& opts = {});

/// Contents of the specbench-data element of an export_html document.
std::optional<std::string> embedded_json(std::string_view html);

}  // namespace specbench
