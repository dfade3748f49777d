#include "specbench/audit.hpp"

#include <set>

#include "assumption_rules.hpp"
#include "specbench/errors.hpp"
#include "specbench/format.hpp"

namespace specbench {

std::vector<AuditRule> parse_audit_rules(std::string_view json_text) {
  static const std::set<std::string> kChecks = {"nyquist", "frequency_resolution", "analysis_band",
                                                "temporal_resolution", "none"};
  try {
    const auto doc = nlohmann::json::parse(json_text);
    std::vector<AuditRule> rules;
    for (const auto& r : doc.at("rules")) {
      AuditRule rule;
      rule.id = r.at("id").get<std::string>();
      rule.software = r.at("software").get<std::string>();
      rule.parameter = r.at("parameter").get<std::string>();
      rule.values = r.at("values").get<std::string>();
      rule.assumption = r.at("assumption").get<std::string>();
      rule.use_case = r.value("use_case", std::string{});
      rule.check = r.at("check").get<std::string>();
      rule.params = r.value("params", nlohmann::json::object());
      if (!kChecks.count(rule.check)) throw ParseError("rule '" + rule.id + "' has unknown check '" + rule.check + "'");
      rules.push_back(std::move(rule));
    }
    return rules;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("assumption rules: ") + e.what());
  }
}

const std::vector<AuditRule>& default_audit_rules() {
  static const std::vector<AuditRule> rules = parse_audit_rules(generated::kAssumptionRulesJson);
  return rules;
}

std::vector<std::string> audit_assumptions(const ParameterManifest& manifest, const AuditContext& context,
                                           const std::vector<AuditRule>& rules) {
  if (!(context.taxon_lo_hz >= 0.0 && context.taxon_lo_hz < context.taxon_hi_hz))
    throw InvalidParams("taxon range must satisfy 0 <= lo < hi");

  std::set<int> rates;
  for (const auto& in : manifest.inputs) {
    if (in.sample_rate_hz <= 0) throw InvalidParams("manifest input '" + in.clip_id + "' has no sample rate");
    rates.insert(in.sample_rate_hz);
  }
  const int n_fft = manifest.value("transform.n_fft").get<int>();
  const double fmin = manifest.value("transform.fmin_hz").get<double>();
  const auto& fmax_json = manifest.value("transform.fmax_hz");

  std::vector<std::string> warnings;
  for (int fs : rates) {
    const double nyquist = fs / 2.0;
    const double fmax = fmax_json.is_null() ? nyquist : std::min(fmax_json.get<double>(), nyquist);
    const std::string tag = "fs=" + std::to_string(fs) + " Hz";
    for (const auto& rule : rules) {
      const std::string source = " [" + rule.id + ": " + rule.software + " " + rule.parameter + " " +
                                 rule.values + ", assumes " + rule.assumption + "]";
      if (rule.check == "nyquist") {
        if (nyquist < context.taxon_hi_hz) {
          warnings.push_back("nyquist: " + tag + " resolves only up to " + fmt_sig6(nyquist) +
                             " Hz, below the taxon ceiling of " + fmt_sig6(context.taxon_hi_hz) + " Hz" + source);
        }
      } else if (rule.check == "frequency_resolution") {
        const double spacing = static_cast<double>(fs) / n_fft;
        const double limit =
            context.taxon_lo_hz * rule.params.value("max_bin_spacing_fraction_of_taxon_lo", 1.0);
        if (spacing > limit) {
          warnings.push_back("frequency_resolution: " + tag + " with n_fft=" + std::to_string(n_fft) +
                             " gives " + fmt_sig6(spacing) + " Hz bins, coarser than " + fmt_sig6(limit) +
                             " Hz at the taxon floor" + source);
        }
      } else if (rule.check == "analysis_band") {
        if (fmin > context.taxon_lo_hz || fmax < context.taxon_hi_hz) {
          warnings.push_back("analysis_band: " + tag + " analyses " + fmt_sig6(fmin) + "-" + fmt_sig6(fmax) +
                             " Hz, which excludes part of the taxon range " + fmt_sig6(context.taxon_lo_hz) +
                             "-" + fmt_sig6(context.taxon_hi_hz) + " Hz" + source);
        }
      } else if (rule.check == "temporal_resolution") {
        const double window_s = static_cast<double>(n_fft) / fs;
        const double limit = rule.params.value("max_window_s", 0.0233);
        if (context.needs_temporal_precision && window_s > limit) {
          warnings.push_back("temporal_resolution: " + tag + " with n_fft=" + std::to_string(n_fft) +
                             " spans " + fmt_sig6(window_s * 1000.0) + " ms per frame, longer than " +
                             fmt_sig6(limit * 1000.0) + " ms" + source);
        }
      }
    }
  }
  return warnings;
}

}  // namespace specbench
