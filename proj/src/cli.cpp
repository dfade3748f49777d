#include "specbench/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "specbench/audit.hpp"
#include "specbench/errors.hpp"
#include "specbench/format.hpp"
#include "specbench/pipeline.hpp"
#include "specbench/render.hpp"
#include "specbench/server.hpp"
#include "specbench/sweep.hpp"

namespace specbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidParams(what + ": '" + s + "' is not a number");
  }
}

/// "lo,hi" or "lo-hi" in Hz.
std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
  auto parts = split(text, ',');
  if (parts.size() != 2) {
    const auto dash = text.find('-', 1);
    if (dash != std::string::npos) parts = {text.substr(0, dash), text.substr(dash + 1)};
  }
  if (parts.size() != 2) throw InvalidParams(what + " must look like lo,hi");
  return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

/// "4096:0-1000,2048:1000-4000,512:4000-11025"
std::vector<BandPlanEntry> parse_plan(const std::string& text) {
  std::vector<BandPlanEntry> plan;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidParams("multires plan entries look like n_fft:lo-hi");
    const auto [lo, hi] = parse_range(item.substr(colon + 1), "multires band");
    plan.push_back({static_cast<int>(parse_double(item.substr(0, colon), "multires n_fft")), lo, hi});
  }
  return plan;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  for (const auto& item : split(text, ',')) {
    if (item == "all" || item == "ALL") return {std::begin(kAllMethods), std::end(kAllMethods)};
    const Method m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw InvalidParams("--methods needs at least one method");
  return out;
}

/// Flags shared by the subcommands that read inputs and run transforms.
struct CommonFlags {
  std::string input = ".";
  std::string pattern = "*.wav";
  std::string indices = "all";
  bool no_annotations = false;
  std::string window = "hann";
  double fmin = 32.70;
  double fmax = 0.0;
  int bins_per_octave = 12;
  std::string wavelet = "sym8";
  int levels = 6;
  std::string chirp_rates;
  std::string multires_plan;
  double peak_percentile = 75.0;
  double min_prominence = 0.05;
  std::size_t max_peaks = 20;
  unsigned jobs = 0;

  std::map<std::string, CLI::Option*> opts;  // manifest name -> option

  void add_input(CLI::App* app) {
    opts["input.root"] = app->add_option("--input", input, "Input directory (searched recursively) or WAV file");
    opts["input.pattern"] = app->add_option("--pattern", pattern, "Glob on file names");
    opts["input.indices"] = app->add_option("--indices", indices, "Indices into the sorted match list, e.g. 0,2,5-7");
    opts["input.annotations"] = app->add_flag("--no-annotations", no_annotations, "Ignore .txt label sidecars");
    opts["run.workers"] = app->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  }

  void add_transform(CLI::App* app) {
    opts["transform.window"] = app->add_option("--window", window, "hann, hamming or rectangular");
    opts["transform.fmin_hz"] = app->add_option("--fmin", fmin, "Lower analysis frequency (Hz)");
    opts["transform.fmax_hz"] = app->add_option("--fmax", fmax, "Upper analysis frequency (Hz, default Nyquist)");
    opts["transform.bins_per_octave"] = app->add_option("--bins-per-octave", bins_per_octave, "CQT bins per octave");
    opts["transform.wavelet"] = app->add_option("--wavelet", wavelet, "sym8 or db8");
    opts["transform.decomposition_levels"] = app->add_option("--levels", levels, "Wavelet decomposition levels");
    opts["transform.chirp_rates_hz_per_s"] =
        app->add_option("--chirp-rates", chirp_rates, "Chirp rate grid in Hz/s, e.g. --chirp-rates=-1000,0,1000");
    opts["transform.multires_window_plan"] =
        app->add_option("--multires-plan", multires_plan, "Band plan, e.g. 4096:0-1000,2048:1000-4000,512:4000-11025");
    opts["peaks.height_percentile"] = app->add_option("--peak-percentile", peak_percentile, "Peak height percentile");
    opts["peaks.min_prominence_fraction"] =
        app->add_option("--min-prominence", min_prominence, "Minimum prominence as a fraction of the spectrum range");
    opts["peaks.max_peaks"] = app->add_option("--max-peaks", max_peaks, "Peaks kept per plot");
  }

  bool set(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  void apply(RunConfig& c) const {
    c.input_root = input;
    c.pattern = pattern;
    c.indices = indices;
    c.use_annotations = !no_annotations;
    c.workers = jobs;
    auto& p = c.params;
    p.window = parse_window(window);
    p.fmin_hz = fmin;
    if (set("transform.fmax_hz")) p.fmax_hz = fmax;
    p.bins_per_octave = bins_per_octave;
    p.wavelet = parse_wavelet(wavelet);
    p.decomposition_levels = levels;
    if (set("transform.chirp_rates_hz_per_s")) {
      p.chirp_rates_hz_per_s.clear();
      for (const auto& r : split(chirp_rates, ',')) p.chirp_rates_hz_per_s.push_back(parse_double(r, "--chirp-rates"));
    }
    if (set("transform.multires_window_plan")) p.multires_window_plan = parse_plan(multires_plan);
    c.peaks.height_percentile = peak_percentile;
    c.peaks.min_prominence_fraction = min_prominence;
    c.peaks.max_peaks = max_peaks;
    for (const auto& [name, opt] : opts)
      if (opt->count() > 0) c.user_set.insert(name);
  }
};

/// A single file as --input selects just that file.
void resolve_single_file(RunConfig& c) {
  if (fs::is_regular_file(c.input_root)) {
    const fs::path p(c.input_root);
    c.input_root = p.parent_path().empty() ? "." : p.parent_path().string();
    c.pattern = p.filename().string();
    c.indices = "all";
    if (c.user_set.count("input.root")) c.user_set.insert("input.pattern");
  }
}

ClipCollection load_collection(const RunConfig& c) {
  const auto files = select_files(c.input_root, c.pattern, IndexSet::parse(c.indices));
  ClipCollection::Builder builder;
  for (const auto& f : files) {
    const AudioClip clip = load_wav(f);
    const auto sidecar = annotation_sidecar_path(f);
    if (c.use_annotations && fs::exists(sidecar)) builder.merge(segment(clip, read_annotations(sidecar)));
    else builder.add(clip, clip_metadata(clip));
  }
  return std::move(builder).build();
}

int report(std::ostream& err, const Error& e, int code) {
  err << "specbench: " << e.what() << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"specbench: batch spectral analysis of audio collections"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // analyze -----------------------------------------------------------------
  CommonFlags an;
  std::string an_methods = "FFT_DUAL", an_export = "csv,json,png", an_out = "specbench_out";
  std::string an_manifest, an_ui_bundle, an_taxon = "1000,8000";
  int an_n_fft = 2048, an_hop = 512, an_auto = kDefaultAutoSelect;
  double an_tol = kDefaultIntegerTolerance, an_vein_jump = 0.0;
  std::size_t an_vein_persist = 5, an_max_veins = 3;
  std::uint64_t an_seed = 0;
  bool an_no_db = false, an_no_spec = false, an_temporal = false;
  auto* analyze = app.add_subcommand("analyze", "Transform, detect peaks and export a collection");
  an.add_input(analyze);
  an.add_transform(analyze);
  an.opts["analysis.methods"] = analyze->add_option("--methods", an_methods, "Comma list of methods or 'all'");
  an.opts["transform.n_fft"] = analyze->add_option("--n-fft", an_n_fft, "FFT size (power of two)");
  an.opts["transform.hop_length"] = analyze->add_option("--hop", an_hop, "Hop length in samples");
  an.opts["export.formats"] = analyze->add_option("--export", an_export, "Any of csv,json,png,html");
  an.opts["output.directory"] = analyze->add_option("--out", an_out, "Output directory");
  an.opts["run.seed"] = analyze->add_option("--seed", an_seed, "Seed recorded with the run");
  an.opts["audit.taxon_range_hz"] = analyze->add_option("--taxon-range", an_taxon, "Taxon frequency range lo,hi in Hz");
  an.opts["audit.needs_temporal_precision"] =
      analyze->add_flag("--temporal-precision", an_temporal, "Audit window length against fine timing needs");
  an.opts["selection.auto_select_n"] = analyze->add_option("--auto-select", an_auto, "Peaks auto-selected per plot (1-5)");
  an.opts["graph.integer_tolerance"] = analyze->add_option("--integer-tolerance", an_tol, "Near-integer ratio tolerance");
  an.opts["veins.max_jump_hz"] = analyze->add_option("--vein-jump", an_vein_jump, "Max vein jump in Hz (0 = 4 bins)");
  an.opts["veins.min_persistence"] = analyze->add_option("--vein-min-frames", an_vein_persist, "Min vein length in frames");
  an.opts["veins.max_veins"] = analyze->add_option("--max-veins", an_max_veins, "Veins kept per clip");
  an.opts["export.include_psd_db"] = analyze->add_flag("--no-psd-db", an_no_db, "Elide psd_db from JSON");
  an.opts["export.include_spectrogram"] = analyze->add_flag("--no-spectrogram", an_no_spec, "Elide spectrograms from JSON");
  an.opts["export.ui_bundle"] = analyze->add_option("--ui-bundle", an_ui_bundle, "UI bundle inlined into report.html");
  analyze->add_option("--from-manifest", an_manifest, "Re-run exactly as recorded in a manifest.json")
      ->excludes(an.opts["input.root"]);

  // grid --------------------------------------------------------------------
  CommonFlags gr;
  std::vector<int> gr_n_fft = {512, 1024, 2048}, gr_hop = {2, 4, 8};
  std::string gr_method = "FFT_DUAL", gr_metric = "spectral_contrast", gr_out = "specbench_grid";
  bool gr_literal = false;
  auto* grid = app.add_subcommand("grid", "Evaluate every n_fft x hop combination on one clip");
  gr.add_input(grid);
  gr.add_transform(grid);
  gr.opts["grid.n_fft_values"] = grid->add_option("--n-fft", gr_n_fft, "n_fft values")->delimiter(',');
  gr.opts["grid.hop_values"] = grid->add_option("--hop", gr_hop, "Hop divisors (or samples with --hop-literal)")->delimiter(',');
  gr.opts["grid.hop_literal"] = grid->add_flag("--hop-literal", gr_literal, "Treat --hop values as samples");
  gr.opts["grid.method"] = grid->add_option("--method", gr_method, "Transform evaluated per cell");
  gr.opts["grid.metric"] = grid->add_option("--metric", gr_metric, "spectral_contrast, peak_count or ridge_variance");
  gr.opts["output.directory"] = grid->add_option("--out", gr_out, "Output directory");

  // sample ------------------------------------------------------------------
  CommonFlags sa;
  std::size_t sa_k = 0;
  std::uint64_t sa_seed = 0;
  auto* sample = app.add_subcommand("sample", "Draw a reproducible random subset of clip ids");
  sa.add_input(sample);
  sample->add_option("-k,--k", sa_k, "Number of clips")->required();
  sample->add_option("--seed", sa_seed, "Random seed");

  // audit -------------------------------------------------------------------
  CommonFlags au;
  std::string au_manifest, au_taxon = "1000,8000";
  int au_n_fft = 2048;
  bool au_temporal = false;
  auto* audit = app.add_subcommand("audit", "Check a configuration against known software assumptions");
  au.add_input(audit);
  au.add_transform(audit);
  audit->add_option("--manifest", au_manifest, "Audit a recorded manifest.json instead of inputs");
  audit->add_option("--n-fft", au_n_fft, "FFT size");
  audit->add_option("--taxon-range", au_taxon, "Taxon frequency range lo,hi in Hz");
  audit->add_flag("--temporal-precision", au_temporal, "The study needs fine timing");

  // serve -------------------------------------------------------------------
  std::string sv_run = "specbench_out", sv_host = "127.0.0.1", sv_ui;
  int sv_port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve an analysis run to the browser client");
  serve->add_option("--out", sv_run, "Run directory written by analyze");
  serve->add_option("--port", sv_port, "TCP port (0 = any free port)");
  serve->add_option("--host", sv_host, "Bind address");
  serve->add_option("--ui-dir", sv_ui, "Static files served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadConfig;
  }

  try {
    if (analyze->parsed()) {
      RunConfig c;
      if (!an_manifest.empty()) {
        const auto doc = json::parse(read_text_file(an_manifest));
        c = config_from_manifest(manifest_from_json(doc.contains("manifest") ? doc.at("manifest") : doc));
      } else {
        an.apply(c);
        c.methods = parse_methods(an_methods);
        c.params.n_fft = an_n_fft;
        c.params.hop_length = an_hop;
        c.exports = parse_export_kinds(an_export);
        c.out_dir = an_out;
        c.seed = an_seed;
        const auto [lo, hi] = parse_range(an_taxon, "--taxon-range");
        c.audit = {lo, hi, an_temporal};
        c.auto_select_n = an_auto;
        c.integer_tolerance = an_tol;
        c.veins = {an_vein_jump, an_vein_persist, an_max_veins};
        c.include_psd_db = !an_no_db;
        c.include_spectrogram = !an_no_spec;
        if (!an_ui_bundle.empty()) c.ui_bundle = an_ui_bundle;
        resolve_single_file(c);
      }

      AnalysisRun result;
      try {
        result = run_analysis(c);
      } catch (const NoMatches& e) {
        return report(err, e, kNoInputs);
      } catch (const InvalidParams& e) {
        return report(err, e, kBadConfig);
      }
      for (const auto& f : result.failures) err << "specbench: skipped " << f.scope << ": " << f.error << "\n";
      err << "specbench: " << result.files_matched << " files matched, " << result.files_failed << " failed, "
          << result.collection.size() << " clips, " << result.snapshot.plots.size() << " plots\n";
      if (result.snapshot.plots.empty()) {
        err << "specbench: every input failed\n";
        return kAllFailed;
      }
      const auto written = write_outputs(result, c);
      for (const auto& w : written.warnings) err << "specbench: warning: " << w << "\n";
      for (const auto& w : result.snapshot.manifest.assumption_audit) err << "specbench: assumption: " << w << "\n";
      for (const auto& f : written.files) out << f << "\n";
      return kOk;
    }

    if (grid->parsed()) {
      RunConfig c;
      gr.apply(c);
      resolve_single_file(c);
      c.out_dir = gr_out;
      ClipCollection collection;
      try {
        collection = load_collection(c);
      } catch (const NoMatches& e) {
        return report(err, e, kNoInputs);
      }
      if (collection.empty()) {
        err << "specbench: no clips to evaluate\n";
        return kNoInputs;
      }
      const AudioClip& clip = *collection.clips().front();

      GridSpec spec;
      spec.n_fft_values = gr_n_fft;
      spec.hop_divisors = gr_hop;
      spec.hop_literal = gr_literal;
      spec.method = parse_method(gr_method);
      spec.metric = parse_grid_metric(gr_metric);
      spec.base = c.params;
      spec.peak_config = c.peaks;
      validate(spec);
      const GridResult result = run_grid(clip, spec, true, c.workers);

      ParameterManifest m;
      auto prov = [&](const std::string& name) { return gr.set(name) ? Provenance::User : Provenance::Default; };
      m.record("input.root", c.input_root, prov("input.root"));
      m.record("input.pattern", c.pattern, prov("input.pattern"));
      m.record("input.indices", c.indices, prov("input.indices"));
      m.record("input.annotations", c.use_annotations, prov("input.annotations"));
      m.record("grid.n_fft_values", spec.n_fft_values, prov("grid.n_fft_values"), "samples");
      m.record("grid.hop_values", spec.hop_divisors, prov("grid.hop_values"));
      m.record("grid.hop_literal", spec.hop_literal, prov("grid.hop_literal"));
      m.record("grid.method", to_string(spec.method), prov("grid.method"));
      m.record("grid.metric", to_string(spec.metric), prov("grid.metric"));
      m.record("transform.window", to_string(c.params.window), prov("transform.window"));
      m.record("transform.fmin_hz", c.params.fmin_hz, prov("transform.fmin_hz"), "Hz");
      m.record("transform.fmax_hz", c.params.fmax_hz ? json(*c.params.fmax_hz) : json(nullptr),
               prov("transform.fmax_hz"), "Hz");
      m.record("peaks.height_percentile", c.peaks.height_percentile, prov("peaks.height_percentile"), "%");
      m.record("peaks.min_prominence_fraction", c.peaks.min_prominence_fraction, prov("peaks.min_prominence_fraction"));
      m.record("peaks.max_peaks", c.peaks.max_peaks, prov("peaks.max_peaks"));
      m.record("output.directory", c.out_dir, prov("output.directory"));
      m.record("run.workers", c.workers, prov("run.workers"));
      m.record("grid.clip_id", clip.id, Provenance::Derived);
      std::vector<int> hops;
      for (const auto& cell : result.cells) hops.push_back(cell.hop_length);
      m.record("grid.cell_hop_lengths", hops, Provenance::Derived, "samples");
      m.inputs.push_back({clip.id, clip.source_path, clip.group_key, clip.label, clip.sample_rate_hz,
                          clip.samples.size(), clip.onset_s, clip.offset_s, sha256_hex(clip.samples)});

      fs::create_directories(c.out_dir);
      const auto csv = grid_csv(result);
      const auto fig = render_grid_figure(result);
      write_file_atomic((fs::path(c.out_dir) / "grid.csv").string(), csv);
      write_file_atomic((fs::path(c.out_dir) / "grid.png").string(),
                        std::string_view(reinterpret_cast<const char*>(fig.png.data()), fig.png.size()));
      write_file_atomic((fs::path(c.out_dir) / "grid.layout.json").string(), to_json(fig.layout).dump() + "\n");
      write_file_atomic((fs::path(c.out_dir) / "manifest.json").string(), dump_json(to_json(m)) + "\n");
      for (const auto& cell : result.cells)
        if (!cell.ok) err << "specbench: cell n_fft=" << cell.n_fft << " hop=" << cell.hop_length << " failed: " << cell.error << "\n";
      out << csv;
      return std::any_of(result.cells.begin(), result.cells.end(), [](const GridCell& g) { return g.ok; }) ? kOk
                                                                                                             : kAllFailed;
    }

    if (sample->parsed()) {
      RunConfig c;
      sa.apply(c);
      resolve_single_file(c);
      if (sa_k < 1) {
        err << "specbench: sample: -k must be at least 1\n" << sample->help();
        return kBadConfig;
      }
      ClipCollection collection;
      try {
        collection = load_collection(c);
      } catch (const NoMatches& e) {
        return report(err, e, kNoInputs);
      }
      try {
        for (const auto& id : sample_validation(collection, sa_k, sa_seed)) out << id << "\n";
      } catch (const KTooLarge& e) {
        return report(err, e, kBadConfig);
      }
      return kOk;
    }

    if (audit->parsed()) {
      ParameterManifest m;
      if (!au_manifest.empty()) {
        const auto doc = json::parse(read_text_file(au_manifest));
        m = manifest_from_json(doc.contains("manifest") ? doc.at("manifest") : doc);
      } else {
        RunConfig c;
        au.apply(c);
        c.params.n_fft = au_n_fft;
        resolve_single_file(c);
        m = config_manifest(c);
        ClipCollection collection;
        try {
          collection = load_collection(c);
        } catch (const NoMatches& e) {
          return report(err, e, kNoInputs);
        }
        for (const auto* clip : collection.clips()) {
          m.inputs.push_back({clip->id, clip->source_path, clip->group_key, clip->label, clip->sample_rate_hz,
                              clip->samples.size(), clip->onset_s, clip->offset_s, sha256_hex(clip->samples)});
        }
      }
      const auto [lo, hi] = parse_range(au_taxon, "--taxon-range");
      for (const auto& w : audit_assumptions(m, {lo, hi, au_temporal})) out << w << "\n";
      return kOk;
    }

    if (serve->parsed()) {
      ServerOptions opts;
      opts.run_dir = sv_run;
      if (!sv_ui.empty()) opts.ui_dir = sv_ui;
      ApiServer server(opts);
      const int port = server.bind(sv_host, sv_port);
      if (port < 0) {
        err << "specbench: cannot bind " << sv_host << ":" << sv_port << "\n";
        return kRuntimeFailure;
      }
      err << "specbench: serving " << sv_run << " on http://" << sv_host << ":" << port << "/\n";
      return server.serve() ? kOk : kRuntimeFailure;
    }
  } catch (const InvalidParams& e) {
    return report(err, e, kBadConfig);
  } catch (const ParseError& e) {
    return report(err, e, kBadConfig);
  } catch (const Error& e) {
    return report(err, e, kRuntimeFailure);
  } catch (const json::exception& e) {
    err << "specbench: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    err << "specbench: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kBadConfig;
}

}  // namespace specbench::cli
