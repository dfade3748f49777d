#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "specbench/clip_store.hpp"
#include "specbench/errors.hpp"
#include "specbench/format.hpp"
#include "specbench/wav.hpp"

using namespace specbench;
namespace fs = std::filesystem;

TEST_CASE("16-bit PCM at 16384 decodes to a constant half-scale clip") {
  oracle::TempDir dir;
  const std::vector<std::int16_t> raw(1000, 16384);
  oracle::write_pcm16_raw(dir / "half.wav", raw, 8000);
  const auto clip = load_wav((dir / "half.wav").string());
  REQUIRE(clip.samples.size() == 1000);
  for (double x : clip.samples) CHECK(std::abs(x - 0.5) <= std::ldexp(1.0, -15));
  CHECK(clip.id == "half");
  CHECK(clip.group_key == "half");
  CHECK(clip.sample_rate_hz == 8000);
}

TEST_CASE("stereo channels of opposite sign average to silence") {
  oracle::TempDir dir;
  std::vector<std::int16_t> raw;
  for (int i = 0; i < 500; ++i) {
    raw.push_back(16384);
    raw.push_back(-16384);
  }
  oracle::write_pcm16_raw(dir / "st.wav", raw, 22050, 2);
  const auto clip = load_wav((dir / "st.wav").string());
  REQUIRE(clip.samples.size() == 500);
  for (double x : clip.samples) CHECK(x == 0.0);
}

TEST_CASE("sample count matches the frame count read from the header") {
  oracle::TempDir dir;
  oracle::write_pcm16(dir / "one.wav", oracle::tone(440, 22050, 1.0, 0.5), 22050);
  const auto bytes = oracle::slurp_bytes(dir / "one.wav");
  const auto info = oracle::parse_wav_header(bytes);
  CHECK(info.frames() == 22050);
  const auto clip = load_wav((dir / "one.wav").string());
  CHECK(clip.samples.size() == info.frames());
  CHECK(clip.duration_s() == doctest::Approx(1.0));
  CHECK(clip.offset_s == doctest::Approx(1.0));
}

TEST_CASE("clip invariants: finite samples within full scale") {
  std::vector<double> x = oracle::white_noise(4096, 7, 2.0);
  x[3] = std::numeric_limits<double>::quiet_NaN();
  x[9] = std::numeric_limits<double>::infinity();
  oracle::TempDir dir;
  wav::write_file((dir / "f.wav").string(), wav::encode(x, 16000, wav::SampleFormat::Float64));
  const auto clip = load_wav((dir / "f.wav").string());
  CHECK(clip.sanitize.nan_replaced == 1);
  CHECK(clip.sanitize.inf_replaced == 1);
  for (double v : clip.samples) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("wav encode/decode round-trips every sample format") {
  const auto x = oracle::tone(1000, 44100, 0.05, 0.8);
  struct Case {
    wav::SampleFormat format;
    double tol;
    int tag;
    int bits;
  };
  for (const auto& c : {Case{wav::SampleFormat::Pcm8, 1.0 / 64, 1, 8}, Case{wav::SampleFormat::Pcm16, 1.0 / 16384, 1, 16},
                        Case{wav::SampleFormat::Pcm24, 1e-6, 1, 24}, Case{wav::SampleFormat::Pcm32, 1e-9, 1, 32},
                        Case{wav::SampleFormat::Float32, 1e-7, 3, 32}, Case{wav::SampleFormat::Float64, 0.0, 3, 64}}) {
    const auto bytes = wav::encode(x, 44100, c.format);
    const auto info = oracle::parse_wav_header(bytes);
    CHECK(info.format_tag == c.tag);
    CHECK(info.bits_per_sample == c.bits);
    CHECK(info.frames() == x.size());
    const auto decoded = wav::decode(bytes);
    REQUIRE(decoded.mono.size() == x.size());
    CHECK(decoded.sample_rate_hz == 44100);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(decoded.mono[i] - x[i]));
    CHECK(err <= c.tol);
  }
}

TEST_CASE("malformed wav buffers are rejected") {
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0, 0, 0, 'W', 'A', 'V', 'E'};
  CHECK_THROWS_AS(wav::decode(junk), UnreadableFile);
  std::vector<std::uint8_t> text = {'h', 'e', 'l', 'l', 'o'};
  CHECK_THROWS_AS(wav::decode(text), UnreadableFile);
  CHECK_THROWS_AS(load_wav("/nonexistent/file.wav"), UnreadableFile);

  const std::vector<double> none;
  oracle::TempDir dir;
  wav::write_file((dir / "empty.wav").string(), wav::encode(none, 8000, wav::SampleFormat::Pcm16));
  CHECK_THROWS_AS(load_wav((dir / "empty.wav").string()), EmptyAudio);
}

TEST_CASE("file selection sorts, filters by pattern and by index") {
  oracle::TempDir dir;
  const std::vector<double> x(100, 0.1);
  for (const char* name : {"b.wav", "a.wav", "sub/c.wav", "pair_1.wav", "pair_2.WAV", "xpair_3.wav"})
    oracle::write_pcm16(dir / name, x, 8000);
  oracle::spit(dir / "pair_notes.txt", "x");

  const auto all = select_files(dir.str(), "*.wav", IndexSet::all());
  std::vector<std::string> expected;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    auto ext = e.path().extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (e.is_regular_file() && ext == ".wav" && e.path().filename().string().ends_with(".wav"))
      expected.push_back(e.path().string());
  }
  std::sort(expected.begin(), expected.end());
  CHECK(all == expected);

  // Exhaustive listing oracle for a prefix pattern.
  std::vector<std::string> prefixed;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    auto ext = e.path().extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (e.is_regular_file() && ext == ".wav" && e.path().filename().string().starts_with("pair_"))
      prefixed.push_back(e.path().string());
  }
  std::sort(prefixed.begin(), prefixed.end());
  const auto pairs = select_files(dir.str(), "pair_*", IndexSet::all());
  CHECK(pairs == prefixed);
  CHECK(pairs.size() == 2);

  const auto three = select_files(dir.str(), "[abc].wav", IndexSet::all());
  REQUIRE(three.size() == 3);
  const auto picked = select_files(dir.str(), "[abc].wav", IndexSet::parse("0,2"));
  REQUIRE(picked.size() == 2);
  CHECK(picked[0] == three[0]);
  CHECK(picked[1] == three[2]);

  CHECK_THROWS_AS(select_files(dir.str(), "nomatch*", IndexSet::all()), NoMatches);
  CHECK_THROWS_AS(select_files(dir.str(), "*.wav", IndexSet::parse("40")), NoMatches);
}

TEST_CASE("index sets parse lists and ranges") {
  const auto s = IndexSet::parse("0, 2,5-7");
  CHECK(s.contains(0));
  CHECK_FALSE(s.contains(1));
  CHECK(s.contains(6));
  CHECK_FALSE(s.contains(8));
  CHECK(s.to_string() == "0,2,5-7");
  CHECK(IndexSet::parse("all").is_all());
  CHECK_THROWS_AS(IndexSet::parse("3-1"), InvalidParams);
  CHECK_THROWS_AS(IndexSet::parse("x"), InvalidParams);
}

TEST_CASE("segmenting with one full-length annotation is the identity") {
  const auto c = oracle::clip("rec", oracle::tone(300, 8000, 1.0), 8000);
  const std::vector<Annotation> ann = {{0.0, 1.0, "call"}};
  const auto col = segment(c, ann);
  REQUIRE(col.size() == 1);
  const auto* part = col.clips().front();
  CHECK(part->samples == c.samples);
  CHECK(part->label == "call");
  CHECK(part->group_key == "call");
  CHECK(part->id == "rec_s000");
}

TEST_CASE("adjacent annotations split a 2 s clip into two 1 s clips") {
  const int fs = 22050;
  const auto c = oracle::clip("rec", oracle::white_noise(2 * fs, 1), fs);
  const std::vector<Annotation> ann = {{0.0, 1.0, "a"}, {1.0, 2.0, "b"}};
  const auto col = segment(c, ann);
  REQUIRE(col.size() == 2);
  for (const auto* part : col.clips()) {
    CHECK(part->samples.size() == static_cast<std::size_t>(fs));
    CHECK(part->offset_s - part->onset_s == doctest::Approx(part->duration_s()).epsilon(1.0 / fs));
  }
}

TEST_CASE("overlapping annotations share exactly the overlapping samples") {
  const int fs = 8000;
  std::vector<double> ramp(2 * fs);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i) / ramp.size();
  const auto c = oracle::clip("rec", ramp, fs);
  const std::vector<Annotation> ann = {{0.0, 1.5, "x"}, {1.0, 2.0, "x"}};
  const auto col = segment(c, ann);
  const auto* first = col.find("rec_s000");
  const auto* second = col.find("rec_s001");
  REQUIRE(first);
  REQUIRE(second);
  // Sample-index oracle: [0, 12000) and [8000, 16000) overlap on [8000, 12000).
  CHECK(first->samples.size() == 12000);
  CHECK(second->samples.size() == 8000);
  std::size_t shared = 0;
  for (std::size_t i = 8000; i < 12000; ++i) shared += first->samples[i] == second->samples[i - 8000];
  CHECK(shared == 4000);
  CHECK(first->samples[8000] == ramp[8000]);
}

TEST_CASE("annotations outside the clip are rejected") {
  const auto c = oracle::clip("rec", std::vector<double>(8000, 0.1), 8000);
  const std::vector<Annotation> late = {{0.5, 1.5, "x"}};
  CHECK_THROWS_AS(segment(c, late), OutOfRangeAnnotation);
  const std::vector<Annotation> negative = {{-0.1, 0.5, "x"}};
  CHECK_THROWS_AS(segment(c, negative), OutOfRangeAnnotation);
}

TEST_CASE("label tracks skip continuation rows and reject bad lines") {
  oracle::TempDir dir;
  oracle::spit(dir / "rec.txt", "0.0\t0.5\tsong\n\\\t1000\t4000\n0.6\t0.9\tcall\r\n");
  const auto ann = read_annotations((dir / "rec.txt").string());
  REQUIRE(ann.size() == 2);
  CHECK(ann[1].label == "call");
  CHECK(ann[1].offset_s == doctest::Approx(0.9));
  oracle::spit(dir / "bad.txt", "0.5\t0.1\tx\n");
  CHECK_THROWS_AS(read_annotations((dir / "bad.txt").string()), ParseError);
  CHECK(annotation_sidecar_path("/a/b/rec.wav") == "/a/b/rec.txt");
}

TEST_CASE("collections group clips and reject duplicate ids") {
  auto a = oracle::clip("a", {0.1}, 8000);
  auto b = oracle::clip("b", {0.2}, 8000);
  a.group_key = b.group_key = "pair";
  ClipCollection::Builder builder;
  builder.add(a, clip_metadata(a)).add(b, clip_metadata(b));
  CHECK_THROWS_AS(builder.add(a, clip_metadata(a)), InvalidParams);
  const auto col = std::move(builder).build();
  CHECK(col.groups().at("pair").size() == 2);
  const auto rows = parse_csv(metadata_csv(col));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].front() == "clip_id");
  CHECK(rows[2][0] == "b");
  CHECK(rows[2][5] == "pair");
}

TEST_CASE("sanitize replaces non-finite samples") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  {
    const std::vector<double> x = {1.0, nan, 2.0};
    auto [y, r] = sanitize(x);
    CHECK(y == std::vector<double>{1.0, 0.0, 2.0});
    CHECK(r.nan_replaced == 1);
  }
  {
    const std::vector<double> x = {0.25, -0.5};
    auto [y, r] = sanitize(x);
    CHECK(y == x);
    CHECK(r == SanitizeReport{});
  }
  {
    const std::vector<double> x = {inf, -inf};
    auto [y, r] = sanitize(x);
    CHECK(y == std::vector<double>{1.0, -1.0});
    CHECK(r.inf_replaced == 2);
  }
  {
    const std::vector<double> x = {nan, -3.0, 0.0, 1e-13, 2.0};
    auto [y, r] = sanitize_spectrum(x);
    CHECK(y == std::vector<double>{0.0, 0.0, 0.0, 1e-13, 2.0});
    CHECK(r.nan_replaced == 1);
    CHECK(r.zero_floored == 4);
  }
}
