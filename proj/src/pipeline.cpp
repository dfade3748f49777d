#include "specbench/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "specbench/errors.hpp"
#include "specbench/parallel.hpp"
#include "specbench/render.hpp"
#include "specbench/wav.hpp"

namespace specbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ExportKind k) {
  switch (k) {
    case ExportKind::Csv: return "csv";
    case ExportKind::Json: return "json";
    case ExportKind::Png: return "png";
    case ExportKind::Html: return "html";
  }
  return "?";
}

std::vector<ExportKind> parse_export_kinds(std::string_view text) {
  std::vector<ExportKind> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(c));
    if (t.empty()) continue;
    ExportKind k;
    if (t == "csv") k = ExportKind::Csv;
    else if (t == "json") k = ExportKind::Json;
    else if (t == "png") k = ExportKind::Png;
    else if (t == "html") k = ExportKind::Html;
    else throw InvalidParams("unknown export format '" + t + "'");
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

void validate(const RunConfig& c) {
  if (c.methods.empty()) throw InvalidParams("at least one method is required");
  if (c.auto_select_n < 1 || c.auto_select_n > 5) throw InvalidParams("auto-select count must be in [1, 5]");
  if (!(c.integer_tolerance > 0.0 && c.integer_tolerance < 0.5))
    throw InvalidParams("integer tolerance must lie in (0, 0.5)");
  if (!(c.audit.taxon_lo_hz >= 0.0 && c.audit.taxon_lo_hz < c.audit.taxon_hi_hz))
    throw InvalidParams("taxon range must satisfy 0 <= lo < hi");
  if (c.out_dir.empty()) throw InvalidParams("output directory must not be empty");
  validate_rate_free(c.params);
  validate(c.peaks);
  if (c.veins.min_persistence < 2) throw InvalidParams("vein min_persistence must be >= 2");
  if (c.veins.max_veins < 1) throw InvalidParams("max_veins must be >= 1");
  if (c.veins.max_jump_hz < 0.0) throw InvalidParams("vein max_jump_hz must be >= 0");
  IndexSet::parse(c.indices);
}

// ---------------------------------------------------------------------------
// Manifest <-> config

namespace {

json plan_json(const std::vector<BandPlanEntry>& plan) {
  json a = json::array();
  for (const auto& e : plan) a.push_back({{"n_fft", e.n_fft}, {"band_lo_hz", e.band_lo_hz}, {"band_hi_hz", e.band_hi_hz}});
  return a;
}

json methods_json(const std::vector<Method>& methods) {
  json a = json::array();
  for (auto m : methods) a.push_back(to_string(m));
  return a;
}

json exports_json(const std::vector<ExportKind>& kinds) {
  json a = json::array();
  for (auto k : kinds) a.push_back(to_string(k));
  return a;
}

}  // namespace

ParameterManifest config_manifest(const RunConfig& c) {
  ParameterManifest m;
  auto rec = [&](const std::string& name, json value, std::string unit = {}) {
    m.record(name, std::move(value), c.user_set.count(name) ? Provenance::User : Provenance::Default,
             std::move(unit));
  };
  const auto& p = c.params;
  rec("input.root", c.input_root);
  rec("input.pattern", c.pattern);
  rec("input.indices", c.indices);
  rec("input.annotations", c.use_annotations);
  rec("input.channel_policy", "average");
  rec("analysis.methods", methods_json(c.methods));
  rec("transform.n_fft", p.n_fft, "samples");
  rec("transform.hop_length", p.hop_length, "samples");
  rec("transform.window", to_string(p.window));
  rec("transform.fmin_hz", p.fmin_hz, "Hz");
  rec("transform.fmax_hz", p.fmax_hz ? json(*p.fmax_hz) : json(nullptr), "Hz");
  rec("transform.bins_per_octave", p.bins_per_octave);
  rec("transform.wavelet", to_string(p.wavelet));
  rec("transform.decomposition_levels", p.decomposition_levels);
  rec("transform.chirp_rates_hz_per_s", p.chirp_rates_hz_per_s, "Hz/s");
  rec("transform.multires_window_plan", plan_json(p.multires_window_plan));
  rec("sanitize.db_floor", kDbFloor);
  rec("peaks.height_percentile", c.peaks.height_percentile, "%");
  rec("peaks.min_prominence_fraction", c.peaks.min_prominence_fraction);
  rec("peaks.max_peaks", c.peaks.max_peaks);
  rec("veins.max_jump_hz", c.veins.max_jump_hz, "Hz");
  rec("veins.min_persistence", c.veins.min_persistence, "frames");
  rec("veins.max_veins", c.veins.max_veins);
  rec("selection.auto_select_n", c.auto_select_n);
  rec("graph.integer_tolerance", c.integer_tolerance);
  rec("export.formats", exports_json(c.exports));
  rec("export.include_psd_db", c.include_psd_db);
  rec("export.include_spectrogram", c.include_spectrogram);
  rec("export.ui_bundle", c.ui_bundle ? json(*c.ui_bundle) : json(nullptr));
  rec("output.directory", c.out_dir);
  rec("run.seed", c.seed);
  rec("run.workers", c.workers);
  rec("audit.taxon_range_hz", json::array({c.audit.taxon_lo_hz, c.audit.taxon_hi_hz}), "Hz");
  rec("audit.needs_temporal_precision", c.audit.needs_temporal_precision);
  return m;
}

RunConfig config_from_manifest(const ParameterManifest& m) {
  try {
    RunConfig c;
    auto v = [&](std::string_view name) -> const json& { return m.value(name); };
    c.input_root = v("input.root").get<std::string>();
    c.pattern = v("input.pattern").get<std::string>();
    c.indices = v("input.indices").get<std::string>();
    c.use_annotations = v("input.annotations").get<bool>();
    c.methods.clear();
    for (const auto& s : v("analysis.methods")) c.methods.push_back(parse_method(s.get<std::string>()));
    auto& p = c.params;
    p.n_fft = v("transform.n_fft").get<int>();
    p.hop_length = v("transform.hop_length").get<int>();
    p.window = parse_window(v("transform.window").get<std::string>());
    p.fmin_hz = v("transform.fmin_hz").get<double>();
    if (!v("transform.fmax_hz").is_null()) p.fmax_hz = v("transform.fmax_hz").get<double>();
    p.bins_per_octave = v("transform.bins_per_octave").get<int>();
    p.wavelet = parse_wavelet(v("transform.wavelet").get<std::string>());
    p.decomposition_levels = v("transform.decomposition_levels").get<int>();
    p.chirp_rates_hz_per_s = v("transform.chirp_rates_hz_per_s").get<std::vector<double>>();
    for (const auto& e : v("transform.multires_window_plan")) {
      p.multires_window_plan.push_back(
          {e.at("n_fft").get<int>(), e.at("band_lo_hz").get<double>(), e.at("band_hi_hz").get<double>()});
    }
    c.peaks.height_percentile = v("peaks.height_percentile").get<double>();
    c.peaks.min_prominence_fraction = v("peaks.min_prominence_fraction").get<double>();
    c.peaks.max_peaks = v("peaks.max_peaks").get<std::size_t>();
    c.veins.max_jump_hz = v("veins.max_jump_hz").get<double>();
    c.veins.min_persistence = v("veins.min_persistence").get<std::size_t>();
    c.veins.max_veins = v("veins.max_veins").get<std::size_t>();
    c.auto_select_n = v("selection.auto_select_n").get<int>();
    c.integer_tolerance = v("graph.integer_tolerance").get<double>();
    c.exports.clear();
    for (const auto& s : v("export.formats")) {
      auto k = parse_export_kinds(s.get<std::string>());
      c.exports.insert(c.exports.end(), k.begin(), k.end());
    }
    c.include_psd_db = v("export.include_psd_db").get<bool>();
    c.include_spectrogram = v("export.include_spectrogram").get<bool>();
    if (!v("export.ui_bundle").is_null()) c.ui_bundle = v("export.ui_bundle").get<std::string>();
    c.out_dir = v("output.directory").get<std::string>();
    c.seed = v("run.seed").get<std::uint64_t>();
    c.workers = v("run.workers").get<unsigned>();
    const auto& taxon = v("audit.taxon_range_hz");
    c.audit.taxon_lo_hz = taxon.at(0).get<double>();
    c.audit.taxon_hi_hz = taxon.at(1).get<double>();
    c.audit.needs_temporal_precision = v("audit.needs_temporal_precision").get<bool>();
    for (const auto& e : m.entries)
      if (e.provenance == Provenance::User) c.user_set.insert(e.name);
    return c;
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("manifest entry malformed: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Analysis

AnalysisRun run_analysis(const RunConfig& config) {
  validate(config);
  const auto files = select_files(config.input_root, config.pattern, IndexSet::parse(config.indices));

  AnalysisRun run;
  run.files_matched = files.size();

  std::vector<std::optional<ClipCollection>> loaded(files.size());
  std::vector<std::string> load_errors(files.size());
  parallel_for(files.size(), config.workers, [&](std::size_t i) {
    try {
      const AudioClip clip = load_wav(files[i]);
      const std::string sidecar = annotation_sidecar_path(files[i]);
      if (config.use_annotations && fs::exists(sidecar)) {
        loaded[i] = segment(clip, read_annotations(sidecar));
      } else {
        loaded[i] = single_clip_collection(clip);
      }
    } catch (const Error& e) {
      load_errors[i] = e.what();
    }
  });

  ClipCollection::Builder builder;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (loaded[i]) {
      try {
        builder.merge(*loaded[i]);
        continue;
      } catch (const Error& e) {
        load_errors[i] = e.what();
      }
    }
    ++run.files_failed;
    run.failures.push_back({files[i], load_errors[i]});
  }
  run.collection = std::move(builder).build();
  const auto clips = run.collection.clips();

  struct ClipExtras {
    std::optional<Spectrogram> spectrogram;
    std::optional<Ridge> ridge;
    std::vector<Vein> veins;
    std::string error;
  };
  std::vector<ClipExtras> extras(clips.size());
  const std::size_t n_methods = config.methods.size();
  std::vector<std::optional<PlotData>> plots(clips.size() * n_methods);
  std::vector<std::string> plot_errors(plots.size());

  parallel_for(clips.size(), config.workers, [&](std::size_t c) {
    try {
      TransformParams p = config.params;
      p.method = Method::FftDual;
      auto spec = compute_spectrogram(*clips[c], dual_spectrogram_params(p));
      extras[c].ridge = extract_ridge(spec);
      extras[c].veins = extract_veins(spec, config.veins);
      extras[c].spectrogram = std::move(spec);
    } catch (const Error& e) {
      extras[c].error = e.what();
    }
  });

  parallel_for(plots.size(), config.workers, [&](std::size_t i) {
    const AudioClip& clip = *clips[i / n_methods];
    const Method method = config.methods[i % n_methods];
    try {
      TransformParams p = config.params;
      p.method = method;
      PlotData plot;
      plot.clip_id = clip.id;
      plot.plot_id = make_plot_id(clip.id, method);
      plot.result = compute(clip, p);
      plot.peaks = detect_peaks(plot.result, config.peaks);
      const auto& ex = extras[i / n_methods];
      plot.spectrogram = ex.spectrogram;
      plot.ridge = ex.ridge;
      plot.veins = ex.veins;
      plots[i] = std::move(plot);
    } catch (const Error& e) {
      plot_errors[i] = e.what();
    }
  });

  auto& snap = run.snapshot;
  snap.integer_tolerance = config.integer_tolerance;
  snap.manifest = config_manifest(config);
  for (std::size_t c = 0; c < clips.size(); ++c) {
    const AudioClip& clip = *clips[c];
    snap.manifest.inputs.push_back({clip.id, clip.source_path, clip.group_key, clip.label, clip.sample_rate_hz,
                                    clip.samples.size(), clip.onset_s, clip.offset_s, sha256_hex(clip.samples)});
    snap.manifest.sanitize_reports.push_back({"clip:" + clip.id, clip.sanitize});
    if (!extras[c].error.empty()) {
      run.failures.push_back({"clip:" + clip.id, extras[c].error});
      snap.manifest.adjustments.push_back({"clip:" + clip.id, "no spectrogram overlay: " + extras[c].error});
    }
  }
  for (std::size_t i = 0; i < plots.size(); ++i) {
    if (!plots[i]) {
      const std::string id = make_plot_id(clips[i / n_methods]->id, config.methods[i % n_methods]);
      run.failures.push_back({id, plot_errors[i]});
      snap.manifest.adjustments.push_back({"plot:" + id, "skipped: " + plot_errors[i]});
      continue;
    }
    auto& plot = *plots[i];
    snap.manifest.sanitize_reports.push_back({"plot:" + plot.plot_id, plot.result.sanitize});
    for (const auto& note : plot.result.notes) snap.manifest.adjustments.push_back({"plot:" + plot.plot_id, note});
    snap.plots.push_back(std::move(plot));
  }

  snap.selection = auto_select(snap.peaks_by_plot(), config.auto_select_n);
  if (!snap.manifest.inputs.empty()) snap.manifest.assumption_audit = audit_assumptions(snap.manifest, config.audit);
  return run;
}

// ---------------------------------------------------------------------------
// Output

std::string clip_audio_filename(const std::string& clip_id) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string name;
  for (unsigned char ch : clip_id) {
    if (std::isalnum(ch) || ch == '-' || ch == '.') {
      name += static_cast<char>(ch);
    } else {
      name += '_';
      name += kHex[ch >> 4];
      name += kHex[ch & 0xF];
    }
  }
  return name + ".wav";
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp);
  }
  fs::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WrittenOutputs write_outputs(const AnalysisRun& run, const RunConfig& config) {
  WrittenOutputs out;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir / "clips");
  auto emit = [&](const std::string& name, std::string_view bytes) {
    const std::string path = (dir / name).string();
    write_file_atomic(path, bytes);
    out.files.push_back(path);
  };
  auto has = [&](ExportKind k) {
    return std::find(config.exports.begin(), config.exports.end(), k) != config.exports.end();
  };
  const auto& snap = run.snapshot;
  const JsonOptions jopts{config.include_psd_db, config.include_spectrogram};

  emit("manifest.json", dump_json(to_json(snap.manifest)) + "\n");
  emit("collection.csv", metadata_csv(run.collection));
  for (const auto* clip : run.collection.clips()) {
    const bool fits_float32 = std::all_of(clip->samples.begin(), clip->samples.end(), [](double x) {
      return static_cast<double>(static_cast<float>(x)) == x;
    });
    const auto bytes = wav::encode(clip->samples, clip->sample_rate_hz,
                                   fits_float32 ? wav::SampleFormat::Float32 : wav::SampleFormat::Float64);
    emit("clips/" + clip_audio_filename(clip->id),
         std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  if (has(ExportKind::Csv)) {
    const auto csv = export_csv(snap);
    emit("peaks.csv", csv.peaks);
    emit("ratios.csv", csv.ratios);
  }
  if (has(ExportKind::Json)) emit("results.json", export_json(snap, jopts));
  if (has(ExportKind::Png)) {
    const auto fig = export_image(snap);
    emit("figure.png", std::string_view(reinterpret_cast<const char*>(fig.png.data()), fig.png.size()));
    emit("figure.layout.json", to_json(fig.layout).dump() + "\n");
  }
  if (has(ExportKind::Html)) {
    std::optional<std::string> bundle;
    if (config.ui_bundle) {
      try {
        bundle = read_text_file(*config.ui_bundle);
      } catch (const Error&) {
        bundle.reset();
      }
    }
    auto report = export_html(snap, bundle, jopts);
    emit("report.html", report.html);
    out.warnings.insert(out.warnings.end(), report.warnings.begin(), report.warnings.end());
  }
  return out;
}

}  // namespace specbench
