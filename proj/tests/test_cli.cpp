#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "specbench/cli.hpp"
#include "specbench/export.hpp"
#include "specbench/format.hpp"

using namespace specbench;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "specbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void write_tone(const fs::path& p, double freq, int fs = 8000, double seconds = 1.0) {
  oracle::write_pcm16(p, oracle::tones(std::vector<double>{freq, 2 * freq}, fs, seconds, 0.4), fs);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

struct CwdGuard {
  fs::path saved = fs::current_path();
  explicit CwdGuard(const fs::path& to) { fs::current_path(to); }
  ~CwdGuard() { fs::current_path(saved); }
};

}  // namespace

TEST_CASE("analyze one clip writes the default outputs") {
  oracle::TempDir dir;
  write_tone(dir / "in/a.wav", 440);
  const auto out = dir / "out";
  const auto r = run({"analyze", "--input", (dir / "in").string(), "--out", out.string()});
  INFO(r.err);
  REQUIRE(r.code == cli::kOk);
  for (const char* f : {"manifest.json", "collection.csv", "clips/a.wav", "peaks.csv", "ratios.csv", "results.json",
                        "figure.png", "figure.layout.json"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  CHECK_FALSE(fs::exists(out / "report.html"));
  CHECK(lines(r.out).size() == 8);

  const auto snap = import_json(oracle::slurp(out / "results.json"));
  REQUIRE(snap.plots.size() == 1);
  CHECK(snap.plots[0].plot_id == "a:FFT_DUAL");
  CHECK(snap.selection.selections.size() == std::min<std::size_t>(4, snap.plots[0].peaks.size()));
  CHECK(oracle::decode_png(oracle::slurp_bytes(out / "figure.png")).width >= 1600);

  // The clip audio decodes back to the samples the analysis saw.
  const auto wav = oracle::slurp_bytes(out / "clips/a.wav");
  const auto info = oracle::parse_wav_header(wav);
  CHECK(info.sample_rate_hz == 8000);
  CHECK(info.frames() == 8000);
  CHECK(snap.manifest.inputs.size() == 1);
  CHECK(snap.manifest.inputs[0].sha256 == sha256_hex(oracle::wav_payload(wav)));
}

TEST_CASE("analyze with no matching files exits 2") {
  oracle::TempDir dir;
  fs::create_directories(dir / "in");
  oracle::spit(dir / "in/readme.txt", "nothing here");
  const auto r = run({"analyze", "--input", (dir / "in").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kNoInputs);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("analyze where every file fails exits 3") {
  oracle::TempDir dir;
  oracle::spit(dir / "in/bad.wav", "not a wave file");
  const auto r = run({"analyze", "--input", (dir / "in").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kAllFailed);
}

TEST_CASE("bad configuration exits 1") {
  oracle::TempDir dir;
  write_tone(dir / "in/a.wav", 440);
  const std::string in = (dir / "in").string(), out = (dir / "out").string();
  CHECK(run({"analyze", "--input", in, "--out", out, "--n-fft", "1000"}).code == cli::kBadConfig);
  CHECK(run({"analyze", "--input", in, "--out", out, "--methods", "FOURIER"}).code == cli::kBadConfig);
  CHECK(run({"analyze", "--input", in, "--out", out, "--export", "pdf"}).code == cli::kBadConfig);
  CHECK(run({"analyze", "--input", in, "--out", out, "--auto-select", "9"}).code == cli::kBadConfig);
  CHECK(run({"analyze", "--no-such-flag"}).code == cli::kBadConfig);
  CHECK(run({}).code == cli::kBadConfig);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK_FALSE(fs::exists(dir / "out/results.json"));
}

TEST_CASE("three clips and five methods give fifteen plots") {
  oracle::TempDir dir;
  write_tone(dir / "in/a.wav", 300);
  write_tone(dir / "in/b.wav", 500);
  write_tone(dir / "in/c.wav", 700);
  const auto out = dir / "out";
  const auto r = run({"analyze", "--input", (dir / "in").string(), "--out", out.string(), "--methods",
                      "FFT_DUAL,CQT,WAVE,SWT,MULTI_RES", "--export", "json,html"});
  INFO(r.err);
  REQUIRE(r.code == cli::kOk);
  const auto snap = import_json(oracle::slurp(out / "results.json"));
  CHECK(snap.plots.size() == 15);
  CHECK(snap.manifest.inputs.size() == 3);
  CHECK(fs::exists(out / "report.html"));
  CHECK_FALSE(fs::exists(out / "figure.png"));
  CHECK(r.err.find("BundleMissing") != std::string::npos);
  const auto html = oracle::slurp(out / "report.html");
  CHECK(embedded_json(html) == oracle::slurp(out / "results.json"));
}

TEST_CASE("manifest provenance follows the flags the user gave") {
  oracle::TempDir dir;
  write_tone(dir / "in/a.wav", 440);
  {
    CwdGuard cwd(dir / "in");
    const auto r = run({"analyze"});
    INFO(r.err);
    REQUIRE(r.code == cli::kOk);
    const auto m = manifest_from_json(nlohmann::json::parse(oracle::slurp(dir / "in/specbench_out/manifest.json")));
    REQUIRE_FALSE(m.entries.empty());
    for (const auto& e : m.entries) CHECK_MESSAGE(e.provenance == Provenance::Default, e.name);
  }

  const auto out = dir / "out";
  const auto r = run({"analyze", "--input", (dir / "in").string(), "--out", out.string(), "--n-fft", "1024",
                      "--fmin", "50"});
  REQUIRE(r.code == cli::kOk);
  const auto m = manifest_from_json(nlohmann::json::parse(oracle::slurp(out / "manifest.json")));
  std::set<std::string> user;
  for (const auto& e : m.entries)
    if (e.provenance == Provenance::User) user.insert(e.name);
  CHECK(user == std::set<std::string>{"input.root", "output.directory", "transform.n_fft", "transform.fmin_hz"});
  CHECK(m.value("transform.n_fft") == 1024);
  CHECK(m.value("transform.hop_length") == 512);
  CHECK(m.find("transform.hop_length")->provenance == Provenance::Default);
}

TEST_CASE("re-running from a manifest reproduces results.json byte for byte") {
  oracle::TempDir dir;
  write_tone(dir / "in/a.wav", 440);
  write_tone(dir / "in/b.wav", 610);
  const auto out = dir / "out";
  const auto first = run({"analyze", "--input", (dir / "in").string(), "--out", out.string(), "--methods",
                          "FFT_DUAL,SWT", "--n-fft", "1024", "--hop", "256", "--peak-percentile", "60"});
  INFO(first.err);
  REQUIRE(first.code == cli::kOk);
  const auto original = oracle::slurp(out / "results.json");
  const auto manifest_copy = dir / "manifest.json";
  fs::copy_file(out / "manifest.json", manifest_copy);
  fs::remove_all(out);

  const auto second = run({"analyze", "--from-manifest", manifest_copy.string()});
  INFO(second.err);
  REQUIRE(second.code == cli::kOk);
  CHECK(oracle::slurp(out / "results.json") == original);
  CHECK(oracle::slurp(out / "manifest.json") == oracle::slurp(manifest_copy));
}

TEST_CASE("grid prints nine rows and writes its figure") {
  oracle::TempDir dir;
  write_tone(dir / "a.wav", 440);
  const auto out = dir / "grid";
  const auto r = run({"grid", "--input", (dir / "a.wav").string(), "--out", out.string()});
  INFO(r.err);
  REQUIRE(r.code == cli::kOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(oracle::slurp(out / "grid.csv") == r.out);
  CHECK(fs::exists(out / "grid.png"));
  CHECK(fs::exists(out / "manifest.json"));
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) best += rows[i][9] == "true";
  CHECK(best == 1);

  CHECK(run({"grid", "--input", (dir / "a.wav").string(), "--out", out.string(), "--hop", "3"}).code ==
        cli::kBadConfig);
}

TEST_CASE("sample is reproducible and validates k") {
  oracle::TempDir dir;
  for (int i = 0; i < 6; ++i) write_tone(dir / ("in/c" + std::to_string(i) + ".wav"), 200 + 100 * i, 8000, 0.1);
  const std::string in = (dir / "in").string();
  const auto a = run({"sample", "--input", in, "-k", "3", "--seed", "11"});
  const auto b = run({"sample", "--input", in, "-k", "3", "--seed", "11"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const auto ids = lines(a.out);
  CHECK(ids.size() == 3);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 3);

  CHECK(run({"sample", "--input", in, "-k", "0"}).code == cli::kBadConfig);
  CHECK(run({"sample", "--input", in, "-k", "7"}).code == cli::kBadConfig);
  CHECK(run({"sample", "--input", in, "--pattern", "*.flac", "-k", "1"}).code == cli::kNoInputs);
}

TEST_CASE("audit reports assumption warnings for the inputs") {
  oracle::TempDir dir;
  write_tone(dir / "in/e.wav", 40, 22050, 0.5);
  const auto low = run({"audit", "--input", (dir / "in").string(), "--taxon-range", "10,200"});
  REQUIRE(low.code == cli::kOk);
  CHECK(low.out.find("frequency_resolution:") != std::string::npos);
  const auto fine = run({"audit", "--input", (dir / "in").string()});
  REQUIRE(fine.code == cli::kOk);
  CHECK(fine.out.empty());
  CHECK(run({"audit", "--input", (dir / "in").string(), "--taxon-range", "200,10"}).code == cli::kBadConfig);
}
