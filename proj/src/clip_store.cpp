#include "specbench/clip_store.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"
#include "specbench/wav.hpp"

namespace fs = std::filesystem;

namespace specbench {

SanitizeReport& SanitizeReport::operator+=(const SanitizeReport& other) {
  nan_replaced += other.nan_replaced;
  inf_replaced += other.inf_replaced;
  zero_floored += other.zero_floored;
  return *this;
}

// ---------------------------------------------------------------------------
// ClipCollection

ClipCollection::Builder& ClipCollection::Builder::add(AudioClip clip, MetadataRow metadata) {
  if (metadata_.contains(clip.id)) throw InvalidParams("duplicate clip id '" + clip.id + "'");
  metadata_.emplace(clip.id, std::move(metadata));
  groups_[clip.group_key].push_back(std::move(clip));
  return *this;
}

ClipCollection::Builder& ClipCollection::Builder::merge(const ClipCollection& other) {
  for (const auto* clip : other.clips()) add(*clip, other.metadata().at(clip->id));
  return *this;
}

ClipCollection ClipCollection::Builder::build() && {
  ClipCollection c;
  c.groups_ = std::move(groups_);
  c.metadata_ = std::move(metadata_);
  return c;
}

std::vector<const AudioClip*> ClipCollection::clips() const {
  std::vector<const AudioClip*> out;
  for (const auto& [key, list] : groups_)
    for (const auto& clip : list) out.push_back(&clip);
  return out;
}

const AudioClip* ClipCollection::find(const std::string& id) const {
  for (const auto& [key, list] : groups_)
    for (const auto& clip : list)
      if (clip.id == id) return &clip;
  return nullptr;
}

std::size_t ClipCollection::size() const { return metadata_.size(); }

// ---------------------------------------------------------------------------
// Ingest

AudioClip load_wav(const std::string& path) {
  auto decoded = wav::read_file(path);
  auto [samples, report] = sanitize(decoded.mono);
  for (auto& x : samples) x = std::clamp(x, -1.0, 1.0);

  AudioClip clip;
  clip.id = fs::path(path).stem().string();
  clip.samples = std::move(samples);
  clip.sample_rate_hz = decoded.sample_rate_hz;
  clip.source_path = path;
  clip.onset_s = 0.0;
  clip.offset_s = clip.duration_s();
  clip.group_key = clip.id;
  clip.label = clip.id;
  clip.sanitize = report;
  return clip;
}

IndexSet IndexSet::parse(const std::string& text) {
  std::string trimmed;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
  if (trimmed.empty() || trimmed == "all") return all();

  auto to_index = [&](std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw InvalidParams("bad index '" + std::string(s) + "' in '" + text + "'");
    return v;
  };

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::stringstream ss(trimmed);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-');
    if (dash == std::string::npos) {
      auto v = to_index(part);
      ranges.emplace_back(v, v);
    } else {
      auto lo = to_index(std::string_view(part).substr(0, dash));
      auto hi = to_index(std::string_view(part).substr(dash + 1));
      if (hi < lo) throw InvalidParams("descending range '" + part + "'");
      ranges.emplace_back(lo, hi);
    }
  }
  return IndexSet(std::move(ranges));
}

bool IndexSet::contains(std::size_t index) const {
  if (all_) return true;
  return std::any_of(ranges_.begin(), ranges_.end(),
                     [&](const auto& r) { return index >= r.first && index <= r.second; });
}

std::string IndexSet::to_string() const {
  if (all_) return "all";
  std::string out;
  for (const auto& [lo, hi] : ranges_) {
    if (!out.empty()) out += ',';
    out += std::to_string(lo);
    if (hi != lo) out += '-' + std::to_string(hi);
  }
  return out;
}

std::vector<std::string> select_files(const std::string& root, const std::string& pattern,
                                      const IndexSet& indices) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw UnreadableFile("'" + root + "' is not a directory");

  std::vector<std::string> matches;
  for (const auto& entry : fs::recursive_directory_iterator(root, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext != ".wav") continue;
    if (fnmatch(pattern.c_str(), name.c_str(), 0) != 0) continue;
    matches.push_back(entry.path().string());
  }
  std::sort(matches.begin(), matches.end());

  std::vector<std::string> selected;
  for (std::size_t i = 0; i < matches.size(); ++i)
    if (indices.contains(i)) selected.push_back(matches[i]);
  if (selected.empty()) {
    throw NoMatches("no .wav files under '" + root + "' match pattern '" + pattern +
                    "' and indices '" + indices.to_string() + "'");
  }
  return selected;
}

std::vector<Annotation> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open annotation file " + path);

  std::vector<Annotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '\\') continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 2) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected onset<TAB>offset<TAB>label");
    }
    Annotation a;
    try {
      a.onset_s = std::stod(fields[0]);
      a.offset_s = std::stod(fields[1]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric time");
    }
    a.label = fields.size() > 2 ? fields[2] : "";
    if (!(a.onset_s < a.offset_s)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": onset must precede offset");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string annotation_sidecar_path(const std::string& wav_path) {
  return fs::path(wav_path).replace_extension(".txt").string();
}

ClipCollection segment(const AudioClip& clip, std::span<const Annotation> annotations) {
  const double fs = clip.sample_rate_hz;
  const double duration = clip.duration_s();
  const double half_sample = 0.5 / fs;

  ClipCollection::Builder builder;
  std::size_t index = 0;
  for (const auto& a : annotations) {
    if (a.onset_s < 0.0 || !(a.onset_s < a.offset_s) || a.offset_s > duration + half_sample) {
      throw OutOfRangeAnnotation(fmt_fixed(a.onset_s, 6) + "-" + fmt_fixed(a.offset_s, 6) +
                                 " s exceeds clip '" + clip.id + "' of " + fmt_fixed(duration, 6) + " s");
    }
    auto begin = static_cast<std::size_t>(std::llround(a.onset_s * fs));
    auto end = std::min(static_cast<std::size_t>(std::llround(a.offset_s * fs)), clip.samples.size());
    if (end <= begin) {
      throw OutOfRangeAnnotation("annotation '" + a.label + "' is shorter than one sample");
    }

    AudioClip part;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_s%03zu", index++);
    part.id = clip.id + suffix;
    part.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                        clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    part.sample_rate_hz = clip.sample_rate_hz;
    part.source_path = clip.source_path;
    part.onset_s = clip.onset_s + static_cast<double>(begin) / fs;
    part.offset_s = clip.onset_s + static_cast<double>(end) / fs;
    part.group_key = a.label;
    part.label = a.label;
    part.sanitize = clip.sanitize;
    auto meta = clip_metadata(part);
    builder.add(std::move(part), std::move(meta));
  }
  return std::move(builder).build();
}

ClipCollection single_clip_collection(const AudioClip& clip) {
  ClipCollection::Builder builder;
  builder.add(clip, clip_metadata(clip));
  return std::move(builder).build();
}

MetadataRow clip_metadata(const AudioClip& clip) {
  return {
      {"source", clip.source_path},
      {"onset_s", fmt_fixed(clip.onset_s, 6)},
      {"offset_s", fmt_fixed(clip.offset_s, 6)},
      {"label", clip.label},
      {"group_key", clip.group_key},
      {"sample_rate_hz", std::to_string(clip.sample_rate_hz)},
  };
}

std::string metadata_csv(const ClipCollection& collection) {
  std::string out = "clip_id,source,onset_s,offset_s,label,group_key,sample_rate_hz\n";
  for (const auto* clip : collection.clips()) {
    const auto& row = collection.metadata().at(clip->id);
    std::vector<std::string> fields{clip->id};
    for (const char* key : {"source", "onset_s", "offset_s", "label", "group_key", "sample_rate_hz"}) {
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& kv) { return kv.first == key; });
      fields.push_back(it == row.end() ? std::string{} : it->second);
    }
    out += csv_row(fields);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sanitizing

std::pair<std::vector<double>, SanitizeReport> sanitize(std::span<const double> values) {
  SanitizeReport report;
  std::vector<double> out(values.begin(), values.end());
  for (auto& x : out) {
    if (std::isnan(x)) {
      x = 0.0;
      ++report.nan_replaced;
    } else if (std::isinf(x)) {
      x = x > 0 ? 1.0 : -1.0;
      ++report.inf_replaced;
    }
  }
  return {std::move(out), report};
}

std::pair<std::vector<double>, SanitizeReport> sanitize_spectrum(std::span<const double> values) {
  auto [out, report] = sanitize(values);
  for (auto& x : out) {
    if (x < 0.0) x = 0.0;
    if (x < kDbFloor) ++report.zero_floored;
  }
  return {std::move(out), report};
}

}  // namespace specbench
