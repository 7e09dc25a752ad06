#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "camra/bench.hpp"
#include "camra/io.hpp"

using namespace camra;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "camra_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CAMRA_CLI_PATH) + " " + args + " >" + (kDir / "stdout.txt").string() + " 2>" +
                          (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const char* name) { return (kDir / name).string(); }

struct Fixture {
  Fixture() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
    y = generate_image(1, 2, 64).mosaic;
    write_pgm(kDir / "in.pgm", to_pgm(y));
    Metadata m;
    m.phase = y.phase;
    m.black = y.black;
    m.bit_depth = y.bit_depth;
    m.pipeline = bench_camera();
    m.pipeline.black = y.black;
    const std::string json = serialize_metadata(m);
    std::ofstream(kDir / "in.json") << json;
  }
  ~Fixture() { fs::remove_all(kDir); }
  BayerImage y;
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "lossless encode and decode reproduce the input file") {
  REQUIRE(run("encode --mode lossless --in " + path("in.pgm") + " --meta " + path("in.json") + " --out " +
              path("s.cmra")) == 0);
  REQUIRE(run("decode --in " + path("s.cmra") + " --out " + path("out.pgm") + " --meta-out " + path("out.json")) == 0);
  CHECK(slurp(kDir / "in.pgm") == slurp(kDir / "out.pgm"));
  const auto meta = read_metadata(kDir / "out.json");
  CHECK(meta.phase == y.phase);
  CHECK(meta.black == y.black);

  // Same inputs, same bytes.
  REQUIRE(run("encode --mode lossless --in " + path("in.pgm") + " --meta " + path("in.json") + " --out " +
              path("t.cmra")) == 0);
  CHECK(slurp(kDir / "s.cmra") == slurp(kDir / "t.cmra"));
}

TEST_CASE_FIXTURE(Fixture, "lossy modes run end to end") {
  for (const char* mode : {"lossy-a", "lossy-b", "camra"}) {
    CAPTURE(mode);
    REQUIRE(run(std::string("encode --mode ") + mode + " --step 4 --lambda 0.1 --in " + path("in.pgm") + " --meta " +
                path("in.json") + " --out " + path("l.cmra")) == 0);
    REQUIRE(run("decode --in " + path("l.cmra") + " --out " + path("l.pgm")) == 0);
    const auto out = read_pgm(kDir / "l.pgm");
    CHECK(out.samples.width() == 64);
    CHECK(psnr(out.samples, y.samples, y.max_value()) > 40);
  }
  CHECK(run("encode --mode lossy-a --fixed-m 0.5 0.5 0.5 -0.5 --step 2 --in " + path("in.pgm") + " --meta " +
            path("in.json") + " --out " + path("f.cmra")) == 0);
}

TEST_CASE_FIXTURE(Fixture, "exit codes") {
  CHECK(run("") == 1);
  CHECK(run("encode --mode bogus --in " + path("in.pgm") + " --meta " + path("in.json") + " --out " + path("x")) == 1);
  CHECK(run("encode --mode lossy-a --step -1 --in " + path("in.pgm") + " --meta " + path("in.json") + " --out " +
            path("x")) == 1);
  CHECK(run("encode --mode lossless --in " + path("missing.pgm") + " --meta " + path("in.json") + " --out " +
            path("x")) == 2);
  CHECK(run("encode --mode lossless --in " + path("in.pgm") + " --meta " + path("missing.json") + " --out " +
            path("x")) == 3);
  std::ofstream(kDir / "bad.json") << "{\"cfa_pattern\": \"XYZW\"}";
  CHECK(run("encode --mode lossless --in " + path("in.pgm") + " --meta " + path("bad.json") + " --out " + path("x")) ==
        3);
  std::ofstream(kDir / "junk.cmra") << "CMRA junk";
  CHECK(run("decode --in " + path("junk.cmra") + " --out " + path("x.pgm")) == 4);
  CHECK(run("decode --in " + path("missing.cmra") + " --out " + path("x.pgm")) == 2);
}

TEST_CASE_FIXTURE(Fixture, "analyze prints decorrelation statistics") {
  REQUIRE(run("analyze --kernel 53 --in " + path("in.pgm") + " --meta " + path("in.json")) == 0);
  const std::string csv = slurp(kDir / "stdout.txt");
  CHECK(csv.rfind("image_id,kernel,pearson_before,pearson_after,entropy_before,entropy_after\n", 0) == 0);
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 5);
  CHECK(row.find(",53,") != std::string::npos);
  CHECK(run("analyze --kernel 42 --in " + path("in.pgm") + " --meta " + path("in.json")) == 1);
}

TEST_CASE_FIXTURE(Fixture, "bench writes a report") {
  REQUIRE(run("bench --count 2 --size 64 --seed 5 --steps 4 16 --out " + path("r.csv")) == 0);
  const std::string csv = slurp(kDir / "r.csv");
  CHECK(csv.find("lossy-a") != std::string::npos);
  CHECK(csv.find("camra") != std::string::npos);
  CHECK(csv.find("mean") != std::string::npos);
}
