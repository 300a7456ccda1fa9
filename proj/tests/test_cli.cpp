#include "doctest.h"

#include "../tools/cli.hpp"
#include "rstreg/raster.hpp"
#include "rstreg/report_io.hpp"
#include "rstreg/synth.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace rstreg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome rstreg_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rstreg");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("rstreg_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string &name) const { return (path_ / name).string(); }
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

void save(const std::string &path, const GrayImage &img) { write_file(path, save_pnm(img)); }

nlohmann::json parse(const std::string &text) { return nlohmann::json::parse(text); }

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("help lists the exit codes") {
  const Outcome r = rstreg_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Exit codes") != std::string::npos);
  CHECK(rstreg_cli({}).code == cli::kUsage);
  CHECK(rstreg_cli({"frobnicate"}).code == cli::kUsage);
}

TEST_CASE("detect against itself and a rotated copy") {
  TempDir tmp;
  const std::string ref = tmp / "ref.pgm";
  save(ref, testing::reference_glyph(0));

  const Outcome self = rstreg_cli({"detect", ref, ref});
  REQUIRE(self.code == 0);
  const auto j = parse(self.out);
  CHECK(j["detected"]["rotation_deg"] == 0.0);
  CHECK(j["detected"]["scale"] == 1.0);
  CHECK(j["detected"]["tx"] == 0);
  CHECK(j["detected"]["ty"] == 0);
  CHECK(j["translation_origin"] == "bottom-left");
  CHECK(j["coarse_trace"].size() == 25);

  const std::string user = tmp / "user.pgm";
  REQUIRE(rstreg_cli({"synth", "--seed", "3", "--rotation", "-48", "--out", user, "--reference-out",
                      ref})
              .code == 0);
  const Outcome rot = rstreg_cli({"detect", ref, user, "--truth", tmp / "user.json"});
  REQUIRE(rot.code == 0);
  const auto jr = parse(rot.out);
  CHECK(jr["detected"]["rotation_deg"] == -48.0);
  CHECK(jr["ground_truth"]["rotation_deg"] == -48.0);
  CHECK(jr["errors"]["translation_exact"] == true);

  const Outcome csv = rstreg_cli({"detect", ref, user, "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
}

TEST_CASE("unreadable and undecodable inputs") {
  TempDir tmp;
  const std::string ref = tmp / "ref.pgm";
  save(ref, testing::reference_glyph(0));
  const std::string missing = tmp / "nope.pgm";
  const Outcome r = rstreg_cli({"detect", ref, missing});
  CHECK(r.code == cli::kIo);
  CHECK(r.err.find(missing) != std::string::npos);

  const std::string junk = tmp / "junk.pgm";
  std::ofstream(junk) << "P5\n10 10\n255\nshort";
  const Outcome bad = rstreg_cli({"detect", ref, junk});
  CHECK(bad.code == cli::kCodec);
  CHECK(bad.err.find(junk) != std::string::npos);

  CHECK(rstreg_cli({"detect", ref, ref, "--threshold", "1.5"}).code == cli::kUsage);
  CHECK(rstreg_cli({"detect", ref, ref, "--format", "xml"}).code == cli::kUsage);
}

TEST_CASE("stage errors map onto distinct exit codes") {
  TempDir tmp;
  const std::string ref = tmp / "ref.pgm";
  save(ref, testing::reference_glyph(0));

  const std::string blank = tmp / "blank.pgm";
  save(blank, GrayImage(64, 64, 1.0));
  CHECK(rstreg_cli({"detect", ref, blank}).code == cli::kBlankImage);

  GrayImage dot(9, 9, 1.0);
  dot.set(4, 4, 0.0);
  const std::string dot_path = tmp / "dot.pgm";
  save(dot_path, dot);
  CHECK(rstreg_cli({"detect", dot_path, dot_path}).code == cli::kNoSignal);

  // Matching a tall one-pixel line to a two-pixel-tall reference shrinks it
  // to nothing.
  GrayImage flat(20, 10, 1.0);
  for (int c = 2; c < 18; ++c) {
    flat.set(c, 4, 0.0);
    flat.set(c, 5, 0.0);
  }
  GrayImage line(5, 120, 1.0);
  for (int r = 10; r < 110; ++r) line.set(2, r, 0.0);
  save(tmp / "flat.pgm", flat);
  save(tmp / "line.pgm", line);
  CHECK(rstreg_cli({"detect", tmp / "flat.pgm", tmp / "line.pgm"}).code == cli::kDegenerateSize);
}

TEST_CASE("correct writes the registered image") {
  TempDir tmp;
  const std::string ref = tmp / "ref.pgm";
  const GrayImage &glyph = testing::reference_glyph(1);
  save(ref, glyph);

  REQUIRE(rstreg_cli({"correct", ref, ref, "--out", tmp / "same.pgm"}).code == 0);
  CHECK(slurp(tmp / "same.pgm") == slurp(ref));

  const std::string user = tmp / "user.pgm";
  REQUIRE(rstreg_cli({"synth", "--seed", "11", "--rotation", "50", "--scale", "1.67",
                      "--canvas-width", "384", "--canvas-height", "384", "--tx", "40", "--ty",
                      "30", "--out", user, "--reference-out", ref})
              .code == 0);
  const std::string fixed = tmp / "fixed.pgm";
  REQUIRE(rstreg_cli({"correct", ref, user, "--out", fixed}).code == 0);
  const GrayImage reference = as_grayscale(load_pnm(read_file(ref)));
  const GrayImage corrected = as_grayscale(load_pnm(read_file(fixed)));
  CHECK(std::abs(corrected.height() - reference.height()) <= 1);

  const Outcome again = rstreg_cli({"detect", ref, fixed});
  REQUIRE(again.code == 0);
  const auto j = parse(again.out);
  CHECK(std::abs(j["detected"]["rotation_deg"].get<double>()) <= 1.0);
  CHECK(std::abs(j["detected"]["scale"].get<double>() - 1.0) <= 0.05);
}

TEST_CASE("synth sidecars and overflow") {
  TempDir tmp;
  const std::string out = tmp / "s.pgm";
  REQUIRE(rstreg_cli({"synth", "--rotation", "37", "--out", out}).code == 0);
  const auto side = parse(slurp(tmp / "s.json"));
  CHECK(side["rotation_deg"] == 37.0);
  CHECK(side["scale"] == 1.0);
  CHECK(side["tx"] == 0);
  CHECK(side["ty"] == 0);
  CHECK(params_from_sidecar(side) == RstParams{37, 1, {0, 0}});

  REQUIRE(rstreg_cli({"synth", "--out", tmp / "i.pgm", "--sidecar", tmp / "truth.json"}).code == 0);
  CHECK(params_from_sidecar(parse(slurp(tmp / "truth.json"))) == RstParams{});

  const Outcome over =
      rstreg_cli({"synth", "--tx", "200", "--canvas-width", "256", "--out", tmp / "o.pgm"});
  CHECK(over.code == cli::kOverflow);
  CHECK(over.err.find("content-overflow") != std::string::npos);
  CHECK(rstreg_cli({"synth", "--scale", "0", "--out", tmp / "z.pgm"}).code == cli::kUsage);
}

TEST_CASE("bench tables") {
  const Outcome t3 = rstreg_cli({"bench", "--table", "3", "--glyphs", "2", "--threads", "1"});
  REQUIRE(t3.code == 0);
  std::istringstream lines(t3.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.rfind("t3-", 0) == 0);
    // trans_exact, skipped, reason are the last three columns.
    CHECK(line.find(",true,false,") != std::string::npos);
  }
  CHECK(rows == 20);

  const Outcome t2 = rstreg_cli({"bench", "--table", "2", "--glyphs", "1"});
  REQUIRE(t2.code == 0);
  CHECK(t2.out.find("t2-g0-s1,0,7.69,") != std::string::npos);

  CHECK(rstreg_cli({"bench", "--table", "7"}).code == cli::kUsage);
}

TEST_CASE("bench all is deterministic") {
  TempDir tmp;
  const std::vector<std::string> args{"bench", "--table", "all", "--glyphs", "1", "--seed", "1"};
  auto a = args;
  a.insert(a.end(), {"--out", tmp / "a.csv"});
  auto b = args;
  b.insert(b.end(), {"--out", tmp / "b.csv", "--threads", "2"});
  REQUIRE(rstreg_cli(a).code == 0);
  REQUIRE(rstreg_cli(b).code == 0);
  const std::string first = slurp(tmp / "a.csv");
  CHECK_FALSE(first.empty());
  CHECK(first == slurp(tmp / "b.csv"));
}

TEST_CASE("batch over subject directories") {
  TempDir tmp;
  fs::create_directories(tmp.path() / "alice");
  fs::create_directories(tmp.path() / "bob");
  const std::string aref = tmp / "alice/reference.pgm";
  REQUIRE(rstreg_cli({"synth", "--seed", "4", "--rotation", "13", "--tx", "20", "--ty", "30",
                      "--out", tmp / "alice/t1.pgm", "--reference-out", aref})
              .code == 0);
  save(tmp / "alice/t2.pgm", GrayImage(50, 50, 1.0));
  REQUIRE(rstreg_cli({"synth", "--seed", "5", "--out", tmp / "bob/x.pgm", "--reference-out",
                      tmp / "bob/reference.pgm"})
              .code == 0);
  fs::remove(tmp.path() / "bob/x.json");

  const Outcome r = rstreg_cli({"batch", tmp.path().string()});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, l1, l2, l3, extra;
  std::getline(lines, header);
  std::getline(lines, l1);
  std::getline(lines, l2);
  std::getline(lines, l3);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(header == kCsvHeader);
  CAPTURE(l1);
  CHECK(l1.rfind("alice/t1.pgm,13,1,20,30,13,", 0) == 0);
  CHECK(l1.find(",20,30,0,") != std::string::npos);
  CHECK(l1.find(",true,false,") != std::string::npos);
  CHECK(l2.rfind("alice/t2.pgm,", 0) == 0);
  CHECK(l2.find("blank-image") != std::string::npos);
  CHECK(l3.rfind("bob/x.pgm,,,,,0,1,0,0,", 0) == 0);

  const Outcome js = rstreg_cli({"batch", tmp.path().string(), "--format", "json"});
  REQUIRE(js.code == 0);
  CHECK(parse(js.out).size() == 3);
  CHECK(rstreg_cli({"batch", tmp / "missing"}).code == cli::kIo);
}
