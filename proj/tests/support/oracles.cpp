#include "oracles.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "specbench/features.hpp"
#include "specbench/format.hpp"
#include "specbench/harmonic.hpp"

namespace oracle {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> tone(double freq_hz, int fs, double seconds, double amplitude, double phase) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(kTwoPi * freq_hz * static_cast<double>(i) / fs + phase);
  return x;
}

std::vector<double> tones(std::span<const double> freqs_hz, int fs, double seconds, double amplitude) {
  std::vector<double> sum;
  for (double f : freqs_hz) {
    auto t = tone(f, fs, seconds, amplitude);
    if (sum.empty()) sum.assign(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) sum[i] += t[i];
  }
  return sum;
}

std::vector<double> linear_chirp(double f0_hz, double rate_hz_per_s, int fs, double seconds) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = std::sin(kTwoPi * (f0_hz * t + 0.5 * rate_hz_per_s * t * t));
  }
  return x;
}

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = std::clamp(scale * dist(rng), -1.0, 1.0);
  return x;
}

specbench::AudioClip clip(std::string id, std::vector<double> samples, int fs) {
  specbench::AudioClip c;
  c.id = id;
  c.group_key = id;
  c.source_path = id + ".wav";
  c.sample_rate_hz = fs;
  c.offset_s = static_cast<double>(samples.size()) / fs;
  c.samples = std::move(samples);
  return c;
}

// ---------------------------------------------------------------------------

std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // Reduce k*t mod n first so the angle stays small and exact.
      const double angle = -kTwoPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / n);
  return w;
}

std::vector<double> naive_welch(std::span<const double> x, std::span<const double> window, std::size_t hop) {
  const std::size_t n = window.size();
  double sum_w = 0.0;
  for (double w : window) sum_w += w;
  std::vector<double> psd(n / 2 + 1, 0.0);
  std::size_t frames = 0;
  std::vector<double> frame(n);
  for (std::size_t s = 0; s + n <= x.size(); s += hop, ++frames) {
    for (std::size_t i = 0; i < n; ++i) frame[i] = x[s + i] * window[i];
    const auto X = naive_dft(frame);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double factor = (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
      psd[k] += factor * std::norm(X[k]) / (sum_w * sum_w);
    }
  }
  for (auto& v : psd) v /= static_cast<double>(frames);
  return psd;
}

double saddle_prominence(std::span<const double> x, std::size_t peak) {
  const double h = x[peak];
  double left_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  double right_min = h;
  for (std::size_t i = peak + 1; i < x.size(); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

std::vector<std::size_t> brute_local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < x.size() && x[j] == x[i]) ++j;
    if (j < x.size() && x[j] < x[i]) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------

TempDir::TempDir(std::string_view tag) {
  static std::mt19937_64 rng(std::random_device{}());
  for (;;) {
    std::ostringstream name;
    name << tag << "-" << std::hex << rng();
    path_ = fs::temp_directory_path() / name.str();
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> slurp_bytes(const fs::path& p) {
  const auto s = slurp(p);
  return {s.begin(), s.end()};
}

void spit(const fs::path& p, std::string_view text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

void put_u16(std::string& s, unsigned v) {
  s += static_cast<char>(v & 0xff);
  s += static_cast<char>((v >> 8) & 0xff);
}

void put_u32(std::string& s, unsigned long v) {
  for (int i = 0; i < 4; ++i) s += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (std::uint32_t(b[at + 3]) << 24);
}

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t(b[at]) << 24) | (b[at + 1] << 16) | (b[at + 2] << 8) | b[at + 3];
}

}  // namespace

void write_pcm16_raw(const fs::path& p, std::span<const std::int16_t> samples, int fs, int channels) {
  const std::size_t data_bytes = samples.size() * 2;
  std::string s = "RIFF";
  put_u32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, static_cast<unsigned>(channels));
  put_u32(s, static_cast<unsigned long>(fs));
  put_u32(s, static_cast<unsigned long>(fs * channels * 2));
  put_u16(s, static_cast<unsigned>(channels * 2));
  put_u16(s, 16);
  s += "data";
  put_u32(s, data_bytes);
  for (std::int16_t v : samples) put_u16(s, static_cast<std::uint16_t>(v));
  spit(p, s);
}

void write_pcm16(const fs::path& p, std::span<const double> samples, int fs, int channels) {
  std::vector<std::int16_t> q(samples.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = static_cast<std::int16_t>(std::lround(std::clamp(samples[i], -1.0, 1.0) * 32767.0));
  write_pcm16_raw(p, q, fs, channels);
}

WavInfo parse_wav_header(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) || std::memcmp(b.data() + 8, "WAVE", 4))
    throw std::runtime_error("not a RIFF/WAVE buffer");
  WavInfo info;
  bool have_fmt = false, have_data = false;
  for (std::size_t at = 12; at + 8 <= b.size();) {
    const std::string id(reinterpret_cast<const char*>(b.data() + at), 4);
    const std::size_t size = le32(b, at + 4);
    const std::size_t body = at + 8;
    if (id == "fmt ") {
      info.format_tag = le16(b, body);
      info.channels = le16(b, body + 2);
      info.sample_rate_hz = static_cast<int>(le32(b, body + 4));
      info.bits_per_sample = le16(b, body + 14);
      if (info.format_tag == 0xFFFE) info.format_tag = le16(b, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      info.data_offset = body;
      info.data_bytes = std::min(size, b.size() - body);
      have_data = true;
    }
    at = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw std::runtime_error("missing fmt or data chunk");
  return info;
}

std::vector<double> wav_payload(std::span<const std::uint8_t> b) {
  const auto info = parse_wav_header(b);
  if (info.channels != 1) throw std::runtime_error("mono only");
  std::vector<double> out(info.frames());
  const auto* p = b.data() + info.data_offset;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (info.format_tag == 3 && info.bits_per_sample == 32) {
      float f;
      std::memcpy(&f, p + 4 * i, 4);
      out[i] = f;
    } else if (info.format_tag == 3 && info.bits_per_sample == 64) {
      std::memcpy(&out[i], p + 8 * i, 8);
    } else if (info.format_tag == 1 && info.bits_per_sample == 16) {
      out[i] = static_cast<std::int16_t>(le16(b, info.data_offset + 2 * i)) / 32768.0;
    } else {
      throw std::runtime_error("unsupported payload");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DecodedPng decode_png(std::span<const std::uint8_t> b) {
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (b.size() < 8 || std::memcmp(b.data(), sig, 8)) throw std::runtime_error("bad PNG signature");
  DecodedPng png;
  std::vector<std::uint8_t> idat;
  for (std::size_t at = 8; at < b.size();) {
    if (at + 12 > b.size()) throw std::runtime_error("truncated chunk");
    const std::size_t len = be32(b, at);
    PngChunk c;
    c.type.assign(reinterpret_cast<const char*>(b.data() + at + 4), 4);
    c.data.assign(b.begin() + at + 8, b.begin() + at + 8 + len);
    const auto crc = static_cast<std::uint32_t>(crc32(0, b.data() + at + 4, static_cast<uInt>(len + 4)));
    c.crc_ok = crc == be32(b, at + 8 + len);
    if (!c.crc_ok) throw std::runtime_error("CRC mismatch in " + c.type);
    if (c.type == "IHDR") {
      png.width = static_cast<int>(be32(c.data, 0));
      png.height = static_cast<int>(be32(c.data, 4));
      if (c.data[8] != 8 || c.data[9] != 2) throw std::runtime_error("expected 8-bit RGB");
    }
    if (c.type == "IDAT") idat.insert(idat.end(), c.data.begin(), c.data.end());
    png.chunks.push_back(std::move(c));
    at += 12 + len;
  }

  const std::size_t stride = static_cast<std::size_t>(png.width) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * png.height);
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, idat.data(), idat.size()) != Z_OK || raw_len != raw.size())
    throw std::runtime_error("IDAT does not inflate to the expected size");

  png.rgb.assign(stride * png.height, 0);
  auto paeth = [](int a, int b2, int c) {
    const int p = a + b2 - c, pa = std::abs(p - a), pb = std::abs(p - b2), pc = std::abs(p - c);
    return pa <= pb && pa <= pc ? a : (pb <= pc ? b2 : c);
  };
  for (int y = 0; y < png.height; ++y) {
    const std::uint8_t filter = raw[y * (stride + 1)];
    const std::uint8_t* in = &raw[y * (stride + 1) + 1];
    std::uint8_t* out = &png.rgb[y * stride];
    const std::uint8_t* up = y > 0 ? &png.rgb[(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= 3 ? out[i - 3] : 0;
      const int u = up ? up[i] : 0;
      const int c = (up && i >= 3) ? up[i - 3] : 0;
      int v = in[i];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += u; break;
        case 3: v += (a + u) / 2; break;
        case 4: v += paeth(a, u, c); break;
        default: throw std::runtime_error("bad filter type");
      }
      out[i] = static_cast<std::uint8_t>(v);
    }
  }
  return png;
}

// ---------------------------------------------------------------------------

std::optional<std::string> html_structure_error(std::string_view html) {
  static const std::set<std::string> kVoid = {"area", "base", "br",   "col",   "embed", "hr",    "img",
                                              "input", "link", "meta", "source", "track", "wbr"};
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  std::size_t at = html.find_first_not_of(" \t\r\n");
  if (at == std::string_view::npos || lower(std::string(html.substr(at, 15))) != "<!doctype html>")
    return "missing <!DOCTYPE html>";
  at += 15;

  std::vector<std::string> stack;
  bool seen_root = false, seen_head = false, seen_body = false;
  while (at < html.size()) {
    const auto lt = html.find('<', at);
    if (lt == std::string_view::npos) break;
    if (html.compare(lt, 4, "<!--") == 0) {
      const auto end = html.find("-->", lt + 4);
      if (end == std::string_view::npos) return "unterminated comment";
      at = end + 3;
      continue;
    }
    const bool closing = lt + 1 < html.size() && html[lt + 1] == '/';
    std::size_t name_start = lt + (closing ? 2 : 1);
    std::size_t name_end = name_start;
    while (name_end < html.size() && (std::isalnum(static_cast<unsigned char>(html[name_end])) || html[name_end] == '-'))
      ++name_end;
    if (name_end == name_start) return "stray '<' at offset " + std::to_string(lt);
    const std::string name = lower(std::string(html.substr(name_start, name_end - name_start)));

    // Find the tag end, honouring quoted attribute values.
    std::size_t gt = name_end;
    char quote = 0;
    for (; gt < html.size(); ++gt) {
      const char c = html[gt];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
    }
    if (gt >= html.size()) return "unterminated tag <" + name;
    at = gt + 1;

    if (closing) {
      if (stack.empty() || stack.back() != name) return "unexpected </" + name + ">";
      stack.pop_back();
      continue;
    }
    if (name == "html") {
      if (seen_root || !stack.empty()) return "second html element";
      seen_root = true;
    } else if (!seen_root) {
      return "<" + name + "> outside html";
    }
    if (name == "head") {
      if (seen_head || seen_body) return "head out of order";
      seen_head = true;
    }
    if (name == "body") {
      if (!seen_head || seen_body) return "body out of order";
      seen_body = true;
    }
    if (kVoid.count(name)) continue;
    if (name == "script" || name == "style") {
      const std::string close = "</" + name;
      std::size_t end = at;
      for (;;) {
        end = html.find("</", end);
        if (end == std::string_view::npos) return "unterminated <" + name + ">";
        if (lower(std::string(html.substr(end, close.size()))) == close) break;
        end += 2;
      }
      const auto close_gt = html.find('>', end);
      if (close_gt == std::string_view::npos) return "unterminated </" + name;
      at = close_gt + 1;
      continue;
    }
    stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  if (!seen_root || !seen_head || !seen_body) return "missing html, head or body";
  return std::nullopt;
}

// ---------------------------------------------------------------------------

specbench::SessionSnapshot random_session(std::mt19937_64& rng) {
  using namespace specbench;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto real = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SessionSnapshot s;
  s.integer_tolerance = real(0.01, 0.3);

  auto& m = s.manifest;
  m.record("transform.n_fft", 1 << (8 + below(5)), Provenance::Default);
  m.record("transform.window", below(2) ? "hann" : "hamming", Provenance::User);
  m.record("transform.fmax_hz", nullptr, Provenance::Default, "Hz");
  m.record("peaks.height_percentile", real(0, 100), Provenance::User, "percent");
  m.record("analysis.methods", nlohmann::json::array({"FFT_DUAL", "CQT"}), Provenance::Default);
  m.record("note<&>", "a \"quoted\" </script> value", Provenance::Derived);

  const std::size_t n_clips = below(3);
  std::vector<std::string> clip_ids;
  for (std::size_t c = 0; c < n_clips; ++c) {
    InputDigest d;
    d.clip_id = "clip" + std::to_string(c) + (below(2) ? "_s001" : "");
    d.source_path = "dir/" + d.clip_id + ".wav";
    d.group_key = below(2) ? "g" : d.clip_id;
    d.label = below(2) ? "" : "label, with comma";
    d.sample_rate_hz = below(2) ? 22050 : 44100;
    d.n_samples = 1 + below(100000);
    d.onset_s = real(0, 5);
    d.offset_s = d.onset_s + real(0.1, 2);
    d.sha256 = std::string(64, "0123456789abcdef"[below(16)]);
    clip_ids.push_back(d.clip_id);
    m.inputs.push_back(d);
    m.sanitize_reports.push_back({"clip:" + d.clip_id, {below(3), below(3), below(3), 1e-12}});
  }
  if (below(2)) m.adjustments.push_back({"plot:x:CQT", "ClipTooShort: too short"});
  if (below(2)) m.assumption_audit.push_back("nyquist: rule audacity-sr ...");

  for (const auto& clip_id : clip_ids) {
    for (Method method : kAllMethods) {
      if (below(2)) continue;
      PlotData plot;
      plot.clip_id = clip_id;
      plot.plot_id = make_plot_id(clip_id, method);
      auto& r = plot.result;
      r.method = method;
      r.params.method = method;
      r.params.n_fft = 1 << (8 + below(4));
      r.params.hop_length = r.params.n_fft / 4;
      if (below(2)) r.params.fmax_hz = real(2000, 11000);
      if (method == Method::MultiRes && below(2))
        r.params.multires_window_plan = {{4096, 0.0, 1000.0}, {512, 1000.0, 11025.0}};
      const std::size_t bins = 1 + below(40);
      double f = real(1, 50);
      for (std::size_t k = 0; k < bins; ++k) {
        r.freqs_hz.push_back(f);
        f += real(1, 300);
        r.psd_linear.push_back(below(8) == 0 ? 0.0 : std::pow(10.0, real(-14, 1)));
      }
      r.psd_db = to_db(r.psd_linear);
      r.sanitize = {below(2), 0, below(4), 1e-12};
      if (below(3) == 0) r.notes.push_back("zero-padded from 100 to 256 samples");

      for (std::size_t k = 0; k < bins && plot.peaks.size() < 6; ++k) {
        if (below(3)) continue;
        Peak p;
        p.bin_index = k;
        p.freq_hz = r.freqs_hz[k];
        p.power_linear = r.psd_linear[k];
        p.power_db = r.psd_db[k];
        p.width_hz = real(0, 100);
        p.prominence = real(0, 1);
        plot.peaks.push_back(p);
      }
      if (below(2)) {
        Spectrogram sg;
        const std::size_t frames = 1 + below(5), cols = 1 + below(6);
        for (std::size_t t = 0; t < frames; ++t) sg.times_s.push_back(0.01 * static_cast<double>(t));
        for (std::size_t k = 0; k < cols; ++k) sg.freqs_hz.push_back(100.0 * static_cast<double>(k));
        sg.magnitude = Matrix(frames, cols);
        for (auto& v : sg.magnitude.data) v = real(0, 2);
        Ridge ridge;
        for (std::size_t t = 0; t < frames; ++t)
          ridge.points.push_back({sg.times_s[t], sg.freqs_hz[below(cols)], real(0, 2)});
        plot.ridge = ridge;
        if (below(2)) {
          Vein v;
          v.points = ridge.points;
          v.persistence_frames = frames;
          plot.veins.push_back(v);
        }
        plot.spectrogram = std::move(sg);
      }
      s.plots.push_back(std::move(plot));
    }
  }

  // Drive the selection through the public operations so it stays valid.
  SelectionState sel;
  for (const auto& plot : s.plots) {
    for (const auto& p : plot.peaks) {
      const auto roll = below(4);
      if (roll == 0) sel = select(sel, plot.plot_id, p);
      else if (roll == 1) sel = remove(sel, plot.plot_id, p);
    }
  }
  for (std::size_t i = 0, n = below(5); i < n && sel.selections.size() >= 2; ++i) {
    const auto& a = sel.selections[below(sel.selections.size())];
    const auto& b = sel.selections[below(sel.selections.size())];
    const bool fresh = std::none_of(sel.pairs.begin(), sel.pairs.end(), [&](const SelectionPair& p) {
      return (p.order_a == a.selection_order && p.order_b == b.selection_order) ||
             (p.order_a == b.selection_order && p.order_b == a.selection_order);
    });
    if (fresh && a.selection_order != b.selection_order) sel = pair(sel, a.selection_order, b.selection_order);
  }
  if (!sel.selections.empty() && below(3) == 0) sel = deselect(sel, sel.selections.front().selection_order);
  s.selection = sel;
  return s;
}

// Export checks --------------------------------------------------------------

using specbench::Peak;
using specbench::SessionSnapshot;
using specbench::parse_csv;

namespace {

bool within_sig6(double parsed, double value) { return std::abs(parsed - value) <= 5.000001e-6 * std::abs(value); }

struct ExpectedRow {
  std::string plot_id;
  std::string order;
  Peak peak;
};

}  // namespace

std::optional<std::string> csv_mismatch(const SessionSnapshot& s, const std::string& peaks_csv,
                                        const std::string& ratios_csv) {
  std::vector<ExpectedRow> expected;
  for (const auto& plot : s.plots) {
    for (const auto& p : plot.peaks) {
      bool removed = false;
      for (const auto& r : s.selection.removed) removed |= r.plot_id == plot.plot_id && r.bin_index == p.bin_index;
      if (removed) continue;
      std::string order;
      for (const auto& sel : s.selection.selections)
        if (sel.plot_id == plot.plot_id && sel.peak.bin_index == p.bin_index) order = std::to_string(sel.selection_order);
      expected.push_back({plot.plot_id, order, p});
    }
  }
  for (const auto& sel : s.selection.selections) {
    bool listed = false;
    for (const auto& plot : s.plots)
      if (plot.plot_id == sel.plot_id)
        for (const auto& p : plot.peaks) listed |= p.bin_index == sel.peak.bin_index;
    if (!listed) expected.push_back({sel.plot_id, std::to_string(sel.selection_order), sel.peak});
  }

  const auto rows = parse_csv(peaks_csv);
  if (rows.size() != expected.size() + 1)
    return "peaks.csv has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(expected.size() + 1);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& r = rows[i + 1];
    const auto& e = expected[i];
    const std::string where = "peaks.csv row " + std::to_string(i + 1);
    if (r.size() != 9) return where + ": wrong field count";
    if (r[0] != e.plot_id) return where + ": plot_id";
    if (r[3] != e.order) return where + ": selection_order";
    const double want[] = {e.peak.freq_hz, e.peak.power_linear, e.peak.power_db, e.peak.width_hz, e.peak.prominence};
    for (std::size_t k = 0; k < 5; ++k)
      if (!within_sig6(std::stod(r[4 + k]), want[k])) return where + ": column " + std::to_string(4 + k);
  }

  const auto ratios = parse_csv(ratios_csv);
  if (ratios.size() != s.selection.pairs.size() + 1) return "ratios.csv row count";
  for (std::size_t i = 0; i < s.selection.pairs.size(); ++i) {
    const auto& p = s.selection.pairs[i];
    const auto& r = ratios[i + 1];
    const std::string where = "ratios.csv row " + std::to_string(i + 1);
    if (r.size() != 5 || r[0] != std::to_string(i + 1)) return where + ": id";
    if (!within_sig6(std::stod(r[1]), s.selection.find(p.order_a)->peak.freq_hz)) return where + ": freq_a";
    if (!within_sig6(std::stod(r[2]), s.selection.find(p.order_b)->peak.freq_hz)) return where + ": freq_b";
    if (!within_sig6(std::stod(r[3]), p.ratio)) return where + ": ratio";
    const bool near = std::abs(p.ratio - std::round(p.ratio)) <= s.integer_tolerance;
    if (r[4] != (near ? "true" : "false")) return where + ": is_near_integer";
  }
  return std::nullopt;
}

std::set<std::string> bare_words(std::string_view text) {
  std::set<std::string> words;
  bool in_string = false;
  std::string word;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word += c;
      continue;
    }
    if (!word.empty() && word != "e" && word != "E") words.insert(word);
    word.clear();
    if (c == '"') in_string = true;
  }
  if (!word.empty()) words.insert(word);
  return words;
}

bool csv_has_nonfinite(const std::string& csv_text) {
  for (const auto& row : parse_csv(csv_text)) {
    for (std::string cell : row) {
      std::transform(cell.begin(), cell.end(), cell.begin(), [](unsigned char c) { return std::tolower(c); });
      if (cell.starts_with("-")) cell.erase(0, 1);
      if (cell.starts_with("nan") || cell.starts_with("inf")) return true;
    }
  }
  return false;
}

}  // namespace oracle
