#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specbench/manifest.hpp"

namespace specbench {

struct AuditContext {
  double taxon_lo_hz = 1000.0;
  double taxon_hi_hz = 8000.0;
  bool needs_temporal_precision = false;
};

/// One row of the shipped rule table. `check` names the test applied:
/// nyquist, frequency_resolution, analysis_band, temporal_resolution or none.
struct AuditRule {
  std::string id;
  std::string software;
  std::string parameter;
  std::string values;
  std::string assumption;
  std::string use_case;
  std::string check;
  nlohmann::json params;
};

/// Throws ParseError on malformed text or an unknown check.
std::vector<AuditRule> parse_audit_rules(std::string_view json_text);

/// The rule table compiled in from data/assumption_rules.json.
const std::vector<AuditRule>& default_audit_rules();

/// One warning per (rule, sample rate) violated. Reads transform.n_fft,
/// transform.fmin_hz, transform.fmax_hz and the input sample rates; throws
/// InvalidParams when the manifest lacks them or the context is inverted.
std::vector<std::string> audit_assumptions(const ParameterManifest& manifest, const AuditContext& context,
                                           const std::vector<AuditRule>& rules = default_audit_rules());

}  // namespace specbench
