#include "specbench/export.hpp"

#include <algorithm>
#include <map>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"

namespace specbench {

using nlohmann::json;

std::string make_plot_id(const std::string& clip_id, Method method) {
  return clip_id + ":" + std::string(to_string(method));
}

const PlotData* SessionSnapshot::find_plot(const std::string& plot_id) const {
  auto it = std::find_if(plots.begin(), plots.end(),
                         [&](const PlotData& p) { return p.plot_id == plot_id; });
  return it == plots.end() ? nullptr : &*it;
}

PeaksByPlot SessionSnapshot::peaks_by_plot() const {
  PeaksByPlot out;
  for (const auto& p : plots) out[p.plot_id] = p.peaks;
  return out;
}

namespace {

json to_json(const SanitizeReport& r) {
  return {{"nan_replaced", r.nan_replaced},
          {"inf_replaced", r.inf_replaced},
          {"zero_floored", r.zero_floored},
          {"epsilon_used", r.epsilon_used}};
}

SanitizeReport sanitize_from_json(const json& j) {
  SanitizeReport r;
  r.nan_replaced = j.at("nan_replaced").get<std::size_t>();
  r.inf_replaced = j.at("inf_replaced").get<std::size_t>();
  r.zero_floored = j.at("zero_floored").get<std::size_t>();
  r.epsilon_used = j.at("epsilon_used").get<double>();
  return r;
}

json to_json(const TrackPoint& p) {
  return {{"time_s", p.time_s}, {"freq_hz", p.freq_hz}, {"magnitude", p.magnitude}};
}

TrackPoint point_from_json(const json& j) {
  return {j.at("time_s").get<double>(), j.at("freq_hz").get<double>(),
          j.at("magnitude").get<double>()};
}

json points_json(const std::vector<TrackPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

std::vector<TrackPoint> points_from_json(const json& j) {
  std::vector<TrackPoint> out;
  for (const auto& p : j) out.push_back(point_from_json(p));
  return out;
}

json to_json(const Spectrogram& s) {
  json rows = json::array();
  for (std::size_t t = 0; t < s.magnitude.rows; ++t) {
    auto r = s.magnitude.row(t);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"times_s", s.times_s}, {"freqs_hz", s.freqs_hz}, {"magnitude", std::move(rows)}};
}

Spectrogram spectrogram_from_json(const json& j) {
  Spectrogram s;
  s.times_s = j.at("times_s").get<std::vector<double>>();
  s.freqs_hz = j.at("freqs_hz").get<std::vector<double>>();
  const auto& rows = j.at("magnitude");
  s.magnitude = Matrix(rows.size(), s.freqs_hz.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    auto r = rows[t].get<std::vector<double>>();
    if (r.size() != s.freqs_hz.size()) throw ParseError("spectrogram row width mismatch");
    std::copy(r.begin(), r.end(), s.magnitude.row(t).begin());
  }
  if (s.times_s.size() != s.magnitude.rows) throw ParseError("spectrogram time axis mismatch");
  return s;
}

template <typename F>
auto parsing(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  } catch (const InvalidParams& e) {
    throw ParseError(e.what());
  }
}

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void append_table(std::string& out, const std::string& caption, std::string_view csv) {
  const auto rows = parse_csv(csv);
  out += "<table>\n<caption>" + html_escape(caption) + "</caption>\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char* cell = r == 0 ? "th" : "td";
    if (r == 0) out += "<thead>";
    if (r == 1) out += "<tbody>";
    out += "<tr>";
    for (const auto& f : rows[r]) out += "<" + std::string(cell) + ">" + html_escape(f) + "</" + cell + ">";
    out += "</tr>";
    if (r == 0) out += "</thead>\n";
    else out += "\n";
  }
  if (rows.size() > 1) out += "</tbody>\n";
  out += "</table>\n";
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

constexpr std::string_view kDataOpen = "<script type=\"application/json\" id=\"specbench-data\">";

}  // namespace

// ---------------------------------------------------------------------------

json to_json(const ParameterManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"name", e.name},
                       {"value", e.value},
                       {"provenance", to_string(e.provenance)},
                       {"unit", e.unit}});
  }
  json inputs = json::array();
  for (const auto& d : m.inputs) {
    inputs.push_back({{"clip_id", d.clip_id},
                      {"source_path", d.source_path},
                      {"group_key", d.group_key},
                      {"label", d.label},
                      {"sample_rate_hz", d.sample_rate_hz},
                      {"n_samples", d.n_samples},
                      {"onset_s", d.onset_s},
                      {"offset_s", d.offset_s},
                      {"sha256", d.sha256}});
  }
  json reports = json::array();
  for (const auto& r : m.sanitize_reports) {
    json o = to_json(r.report);
    o["scope"] = r.scope;
    reports.push_back(std::move(o));
  }
  json adjustments = json::array();
  for (const auto& a : m.adjustments) adjustments.push_back({{"scope", a.scope}, {"note", a.note}});
  return {{"tool_version", m.tool_version},
          {"entries", std::move(entries)},
          {"inputs", std::move(inputs)},
          {"sanitize_reports", std::move(reports)},
          {"adjustments", std::move(adjustments)},
          {"assumption_audit", m.assumption_audit}};
}

ParameterManifest manifest_from_json(const json& j) {
  return parsing([&] {
    ParameterManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& e : j.at("entries")) {
      m.record(e.at("name").get<std::string>(), e.at("value"),
               parse_provenance(e.at("provenance").get<std::string>()),
               e.value("unit", std::string{}));
    }
    for (const auto& d : j.at("inputs")) {
      InputDigest in;
      in.clip_id = d.at("clip_id").get<std::string>();
      in.source_path = d.at("source_path").get<std::string>();
      in.group_key = d.value("group_key", std::string{});
      in.label = d.value("label", std::string{});
      in.sample_rate_hz = d.value("sample_rate_hz", 0);
      in.n_samples = d.value("n_samples", std::size_t{0});
      in.onset_s = d.value("onset_s", 0.0);
      in.offset_s = d.value("offset_s", 0.0);
      in.sha256 = d.at("sha256").get<std::string>();
      m.inputs.push_back(std::move(in));
    }
    for (const auto& r : j.value("sanitize_reports", json::array()))
      m.sanitize_reports.push_back({r.at("scope").get<std::string>(), sanitize_from_json(r)});
    for (const auto& a : j.value("adjustments", json::array()))
      m.adjustments.push_back({a.at("scope").get<std::string>(), a.at("note").get<std::string>()});
    m.assumption_audit = j.value("assumption_audit", std::vector<std::string>{});
    return m;
  });
}

json to_json(const TransformParams& p) {
  json plan = json::array();
  for (const auto& e : p.multires_window_plan)
    plan.push_back({{"n_fft", e.n_fft}, {"band_lo_hz", e.band_lo_hz}, {"band_hi_hz", e.band_hi_hz}});
  return {{"method", to_string(p.method)},
          {"n_fft", p.n_fft},
          {"hop_length", p.hop_length},
          {"window", to_string(p.window)},
          {"fmin_hz", p.fmin_hz},
          {"fmax_hz", p.fmax_hz ? json(*p.fmax_hz) : json(nullptr)},
          {"bins_per_octave", p.bins_per_octave},
          {"wavelet", to_string(p.wavelet)},
          {"decomposition_levels", p.decomposition_levels},
          {"chirp_rates_hz_per_s", p.chirp_rates_hz_per_s},
          {"multires_window_plan", std::move(plan)}};
}

TransformParams params_from_json(const json& j) {
  return parsing([&] {
    TransformParams p;
    p.method = parse_method(j.at("method").get<std::string>());
    p.n_fft = j.at("n_fft").get<int>();
    p.hop_length = j.at("hop_length").get<int>();
    p.window = parse_window(j.at("window").get<std::string>());
    p.fmin_hz = j.at("fmin_hz").get<double>();
    if (!j.at("fmax_hz").is_null()) p.fmax_hz = j.at("fmax_hz").get<double>();
    p.bins_per_octave = j.at("bins_per_octave").get<int>();
    p.wavelet = parse_wavelet(j.at("wavelet").get<std::string>());
    p.decomposition_levels = j.at("decomposition_levels").get<int>();
    p.chirp_rates_hz_per_s = j.at("chirp_rates_hz_per_s").get<std::vector<double>>();
    for (const auto& e : j.at("multires_window_plan")) {
      p.multires_window_plan.push_back({e.at("n_fft").get<int>(), e.at("band_lo_hz").get<double>(),
                                        e.at("band_hi_hz").get<double>()});
    }
    return p;
  });
}

json to_json(const Peak& p) {
  return {{"bin_index", p.bin_index},   {"freq_hz", p.freq_hz},   {"power_linear", p.power_linear},
          {"power_db", p.power_db},     {"width_hz", p.width_hz}, {"prominence", p.prominence}};
}

Peak peak_from_json(const json& j) {
  return parsing([&] {
    Peak p;
    p.bin_index = j.at("bin_index").get<std::size_t>();
    p.freq_hz = j.at("freq_hz").get<double>();
    p.power_linear = j.at("power_linear").get<double>();
    p.power_db = j.at("power_db").get<double>();
    p.width_hz = j.at("width_hz").get<double>();
    p.prominence = j.at("prominence").get<double>();
    return p;
  });
}

json to_json(const PlotData& plot, const JsonOptions& opts) {
  const auto& r = plot.result;
  json peaks = json::array();
  for (const auto& p : plot.peaks) peaks.push_back(to_json(p));
  json veins = json::array();
  for (const auto& v : plot.veins)
    veins.push_back({{"persistence_frames", v.persistence_frames}, {"points", points_json(v.points)}});

  json j = {{"plot_id", plot.plot_id},
            {"clip_id", plot.clip_id},
            {"method", to_string(r.method)},
            {"params", to_json(r.params)},
            {"freqs_hz", r.freqs_hz},
            {"psd_linear", r.psd_linear},
            {"sanitize", to_json(r.sanitize)},
            {"notes", r.notes},
            {"peaks", std::move(peaks)},
            {"veins", std::move(veins)}};
  if (opts.include_psd_db) j["psd_db"] = r.psd_db;
  if (opts.include_spectrogram && plot.spectrogram) j["spectrogram"] = to_json(*plot.spectrogram);
  if (plot.ridge) j["ridge"] = points_json(plot.ridge->points);
  return j;
}

PlotData plot_from_json(const json& j) {
  return parsing([&] {
    PlotData plot;
    plot.plot_id = j.at("plot_id").get<std::string>();
    plot.clip_id = j.at("clip_id").get<std::string>();
    auto& r = plot.result;
    r.method = parse_method(j.at("method").get<std::string>());
    r.params = params_from_json(j.at("params"));
    r.freqs_hz = j.at("freqs_hz").get<std::vector<double>>();
    r.psd_linear = j.at("psd_linear").get<std::vector<double>>();
    if (r.freqs_hz.size() != r.psd_linear.size()) throw ParseError("freqs/psd length mismatch");
    r.psd_db = j.contains("psd_db") ? j.at("psd_db").get<std::vector<double>>() : to_db(r.psd_linear);
    r.sanitize = sanitize_from_json(j.at("sanitize"));
    r.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& p : j.at("peaks")) plot.peaks.push_back(peak_from_json(p));
    if (j.contains("spectrogram")) plot.spectrogram = spectrogram_from_json(j.at("spectrogram"));
    if (j.contains("ridge")) plot.ridge = Ridge{points_from_json(j.at("ridge"))};
    for (const auto& v : j.value("veins", json::array())) {
      Vein vein;
      vein.persistence_frames = v.at("persistence_frames").get<std::size_t>();
      vein.points = points_from_json(v.at("points"));
      plot.veins.push_back(std::move(vein));
    }
    return plot;
  });
}

json to_json(const SelectionState& s) {
  json selections = json::array();
  for (const auto& sel : s.selections) {
    selections.push_back({{"plot_id", sel.plot_id},
                          {"selection_order", sel.selection_order},
                          {"peak", to_json(sel.peak)}});
  }
  json pairs = json::array();
  for (const auto& p : s.pairs)
    pairs.push_back({{"order_a", p.order_a}, {"order_b", p.order_b}, {"ratio", p.ratio}});
  json removed = json::array();
  for (const auto& r : s.removed) removed.push_back({{"plot_id", r.plot_id}, {"bin_index", r.bin_index}});
  return {{"selections", std::move(selections)},
          {"pairs", std::move(pairs)},
          {"removed", std::move(removed)},
          {"next_order", s.next_order}};
}

SelectionState selection_from_json(const json& j) {
  return parsing([&] {
    SelectionState s;
    for (const auto& sel : j.at("selections")) {
      s.selections.push_back({sel.at("plot_id").get<std::string>(), peak_from_json(sel.at("peak")),
                              sel.at("selection_order").get<int>()});
    }
    for (const auto& p : j.at("pairs"))
      s.pairs.push_back({p.at("order_a").get<int>(), p.at("order_b").get<int>(), p.at("ratio").get<double>()});
    for (const auto& r : j.value("removed", json::array()))
      s.removed.push_back({r.at("plot_id").get<std::string>(), r.at("bin_index").get<std::size_t>()});
    int max_order = 0;
    for (const auto& sel : s.selections) max_order = std::max(max_order, sel.selection_order);
    s.next_order = j.value("next_order", max_order + 1);
    for (const auto& p : s.pairs) {
      if (!s.find(p.order_a) || !s.find(p.order_b))
        throw ParseError("pair references an unknown selection order");
    }
    if (s.next_order <= max_order) throw ParseError("next_order must exceed every selection order");
    return s;
  });
}

json to_json(const HarmonicGraph& g, double integer_tolerance) {
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"freq_hz", n.freq_hz}, {"plot_ids", n.plot_ids}});
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"node_a", e.node_a},
                     {"node_b", e.node_b},
                     {"ratio", e.ratio},
                     {"is_near_integer", e.is_near_integer},
                     {"nearest_integer", e.nearest_integer}});
  }
  return {{"integer_tolerance", integer_tolerance}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json to_json(const SessionSnapshot& s, const JsonOptions& opts) {
  json plots = json::array();
  for (const auto& p : s.plots) plots.push_back(to_json(p, opts));
  json j = to_json(s.selection);
  j["schema"] = kJsonSchemaVersion;
  j["manifest"] = to_json(s.manifest);
  j["plots"] = std::move(plots);
  j["graph"] = to_json(s.graph(), s.integer_tolerance);
  return j;
}

std::string dump_json(const json& j) {
  const std::string raw = j.dump(-1, ' ', false, json::error_handler_t::replace);
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '<': out += "\\u003c"; break;
      case '>': out += "\\u003e"; break;
      case '&': out += "\\u0026"; break;
      default: out += c;
    }
  }
  return out;
}

std::string export_json(const SessionSnapshot& s, const JsonOptions& opts) {
  return dump_json(to_json(s, opts));
}

std::string plot_json_text(const PlotData& plot, const JsonOptions& opts) {
  return dump_json(to_json(plot, opts));
}

SessionSnapshot import_json(std::string_view text) {
  return parsing([&] {
    const json j = json::parse(text);
    const int schema = j.at("schema").get<int>();
    if (schema != kJsonSchemaVersion)
      throw ParseError("unsupported schema version " + std::to_string(schema));
    SessionSnapshot s;
    s.manifest = manifest_from_json(j.at("manifest"));
    for (const auto& p : j.at("plots")) s.plots.push_back(plot_from_json(p));
    s.selection = selection_from_json(j);
    s.integer_tolerance = j.at("graph").value("integer_tolerance", kDefaultIntegerTolerance);
    return s;
  });
}

// ---------------------------------------------------------------------------

CsvTables export_csv(const SessionSnapshot& s) {
  CsvTables t;
  t.peaks = "plot_id,clip_id,method,selection_order,freq_hz,power_linear,power_db,width_hz,prominence\n";
  auto peak_row = [&](const std::string& plot_id, const std::string& clip_id, Method method,
                      const Peak& p, const Selection* sel) {
    const std::vector<std::string> row{plot_id,
                                       clip_id,
                                       std::string(to_string(method)),
                                       sel ? std::to_string(sel->selection_order) : "",
                                       fmt_sig6(p.freq_hz),
                                       fmt_sig6(p.power_linear),
                                       fmt_sig6(p.power_db),
                                       fmt_sig6(p.width_hz),
                                       fmt_sig6(p.prominence)};
    t.peaks += csv_row(row);
  };

  for (const auto& plot : s.plots) {
    for (const auto& p : plot.peaks) {
      if (s.selection.is_removed(plot.plot_id, p.bin_index)) continue;
      peak_row(plot.plot_id, plot.clip_id, plot.result.method, p,
               s.selection.find(plot.plot_id, p.bin_index));
    }
  }
  // Selections whose peak is not in any plot's detected list still get a row.
  for (const auto& sel : s.selection.selections) {
    const PlotData* plot = s.find_plot(sel.plot_id);
    const bool listed = plot && std::any_of(plot->peaks.begin(), plot->peaks.end(), [&](const Peak& p) {
                          return p.bin_index == sel.peak.bin_index;
                        });
    if (listed) continue;
    peak_row(sel.plot_id, plot ? plot->clip_id : "", plot ? plot->result.method : Method::FftDual,
             sel.peak, &sel);
  }

  t.ratios = "pair_id,freq_a_hz,freq_b_hz,ratio,is_near_integer\n";
  const auto graph = s.graph();
  for (std::size_t i = 0; i < s.selection.pairs.size(); ++i) {
    const auto& p = s.selection.pairs[i];
    const std::vector<std::string> row{std::to_string(i + 1),
                                       fmt_sig6(s.selection.find(p.order_a)->peak.freq_hz),
                                       fmt_sig6(s.selection.find(p.order_b)->peak.freq_hz),
                                       fmt_sig6(p.ratio),
                                       graph.edges[i].is_near_integer ? "true" : "false"};
    t.ratios += csv_row(row);
  }
  return t;
}

// ---------------------------------------------------------------------------

HtmlReport export_html(const SessionSnapshot& s, const std::optional<std::string>& ui_bundle_js,
                       const JsonOptions& opts) {
  HtmlReport report;
  std::string& out = report.html;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n";
  out += "<title>specbench report</title>\n<style>\n";
  out += "body{font-family:sans-serif;margin:1.5em}table{border-collapse:collapse;margin:1em 0}"
         "th,td{border:1px solid #bbb;padding:2px 6px;font-size:13px}caption{font-weight:bold;text-align:left}\n";
  out += "</style>\n</head>\n<body>\n";
  out += std::string(kDataOpen) + export_json(s, opts) + "</script>\n";

  if (ui_bundle_js) {
    std::string js = replace_all(*ui_bundle_js, "</script", "<\\/script");
    js = replace_all(std::move(js), "<!--", "<\\!--");
    out += "<div id=\"app\"></div>\n<script>\n" + js + "\n</script>\n";
  } else {
    report.warnings.push_back("BundleMissing: no ui bundle available, emitted static tables");
    out += "<h1>specbench report</h1>\n";
    out += "<p>Interactive view unavailable; tables below reflect the embedded data.</p>\n";
    const auto csv = export_csv(s);
    append_table(out, "Peaks", csv.peaks);
    append_table(out, "Ratios", csv.ratios);

    std::string manifest_csv = "name,value,provenance,unit\n";
    for (const auto& e : s.manifest.entries) {
      const std::vector<std::string> row{e.name, e.value.dump(), std::string(to_string(e.provenance)), e.unit};
      manifest_csv += csv_row(row);
    }
    append_table(out, "Parameters", manifest_csv);
    if (!s.manifest.assumption_audit.empty()) {
      out += "<h2>Assumption warnings</h2>\n<ul>\n";
      for (const auto& w : s.manifest.assumption_audit) out += "<li>" + html_escape(w) + "</li>\n";
      out += "</ul>\n";
    }
  }
  out += "</body>\n</html>\n";
  return report;
}

std::optional<std::string> embedded_json(std::string_view html) {
  const auto begin = html.find(kDataOpen);
  if (begin == std::string_view::npos) return std::nullopt;
  const auto start = begin + kDataOpen.size();
  const auto end = html.find("</script>", start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(html.substr(start, end - start));
}

}  // namespace specbench
