#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specbench {

struct SanitizeReport {
  std::size_t nan_replaced = 0;
  std::size_t inf_replaced = 0;
  std::size_t zero_floored = 0;
  double epsilon_used = 1e-12;

  SanitizeReport& operator+=(const SanitizeReport& other);
  bool operator==(const SanitizeReport&) const = default;
};

struct AudioClip {
  std::string id;
  std::vector<double> samples;
  int sample_rate_hz = 0;
  std::string source_path;
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string group_key;
  std::string label;
  SanitizeReport sanitize;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct Annotation {
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string label;
};

using MetadataRow = std::vector<std::pair<std::string, std::string>>;

/// Clips grouped by key; metadata is kept in its own table, keyed by clip id.
/// Immutable once built; use ClipCollection::Builder to assemble one.
class ClipCollection {
 public:
  class Builder {
   public:
    /// Throws InvalidParams if the id is already present.
    Builder& add(AudioClip clip, MetadataRow metadata);
    Builder& merge(const ClipCollection& other);
    ClipCollection build() &&;

   private:
    std::map<std::string, std::vector<AudioClip>> groups_;
    std::map<std::string, MetadataRow> metadata_;
  };

  const std::map<std::string, std::vector<AudioClip>>& groups() const { return groups_; }
  const std::map<std::string, MetadataRow>& metadata() const { return metadata_; }

  /// Clips in group order, then insertion order within a group.
  std::vector<const AudioClip*> clips() const;
  const AudioClip* find(const std::string& id) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  std::map<std::string, std::vector<AudioClip>> groups_;
  std::map<std::string, MetadataRow> metadata_;
};

// ---------------------------------------------------------------------------
// Ingest
// ---------------------------------------------------------------------------

/// Loads a WAV file as a mono clip (channels averaged, full-scale normalized,
/// sanitized). The clip id and group key default to the file stem.
AudioClip load_wav(const std::string& path);

/// Index selection over a sorted match list. Text form: "all" or a comma list
/// of indices and inclusive ranges, e.g. "0,2,5-7".
class IndexSet {
 public:
  static IndexSet all() { return IndexSet{}; }
  static IndexSet parse(const std::string& text);
  explicit IndexSet(std::vector<std::pair<std::size_t, std::size_t>> ranges)
      : ranges_(std::move(ranges)), all_(false) {}

  bool is_all() const { return all_; }
  bool contains(std::size_t index) const;
  std::string to_string() const;

 private:
  IndexSet() = default;
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
  bool all_ = true;
};

/// Recursively lists .wav files under root whose file name matches the glob
/// pattern, sorted lexicographically by path, then filtered by index.
/// Throws NoMatches when the selection is empty.
std::vector<std::string> select_files(const std::string& root,
                                      const std::string& pattern,
                                      const IndexSet& indices);

/// Reads a tab-separated label track: onset<TAB>offset<TAB>label per line.
/// Lines starting with '\' (spectral-range continuation rows) are skipped.
std::vector<Annotation> read_annotations(const std::string& path);

/// Sidecar path for a WAV file: same stem, .txt extension.
std::string annotation_sidecar_path(const std::string& wav_path);

/// One clip per annotation; group key and label come from the annotation.
/// Clip ids are "<parent id>_s<NNN>". Throws OutOfRangeAnnotation.
ClipCollection segment(const AudioClip& clip, std::span<const Annotation> annotations);

/// Collection holding the clip unsegmented, grouped under its own group key.
ClipCollection single_clip_collection(const AudioClip& clip);

MetadataRow clip_metadata(const AudioClip& clip);

/// `clip_id,source,onset_s,offset_s,label,group_key,sample_rate_hz`
std::string metadata_csv(const ClipCollection& collection);

// ---------------------------------------------------------------------------
// Sanitizing
// ---------------------------------------------------------------------------

inline constexpr double kDbFloor = 1e-12;

/// Time-domain rule: NaN -> 0, +/-Inf -> +/-1 (full scale).
std::pair<std::vector<double>, SanitizeReport> sanitize(std::span<const double> values);

/// Non-negative spectral context: NaN -> 0, Inf -> 1, negatives -> 0. Zeros
/// stay zero in linear storage; zero_floored counts the values that will be
/// floored to epsilon when converted to dB.
std::pair<std::vector<double>, SanitizeReport> sanitize_spectrum(std::span<const double> values);

}  // namespace specbench
