#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sandlab/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "sandlab_cli_test";

int run(const std::string& args, const std::string& stdout_file = "", const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + std::string("\"") + SANDLAB_CLI_PATH + "\" " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > \"" + stdout_file + "\"";
  cmd += " 2> /dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path fresh(const std::string& name) {
  const auto d = kScratch / name;
  fs::remove_all(d);
  fs::create_directories(kScratch);
  return d;
}

}  // namespace

TEST_CASE("stabilize on the single vertex") {
  const auto out = fresh("stab.json");
  REQUIRE(run("stabilize --box 0 --add 7", out.string()) == 0);
  const auto j = json::parse(slurp(out));
  CHECK(j["origin_height"] == 3);
  CHECK(j["origin_odometer"] == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("--bogus") == 2);
  CHECK(run("stabilize --bogus") == 2);
  CHECK(run("nosuchcommand") == 2);
  CHECK(run("exact2d --kernel-radius 700") == 3);
  CHECK(run("graph --box -3") == 2);
  CHECK(run("growth --mode relax --height 3 --n 10") == 2);
}

TEST_CASE("every subcommand runs") {
  for (const char* args : {"graph --box 2", "stabilize --box 2 --add 40", "chain --box 2 --samples 200",
                           "sample --box 4 --samples 100", "bijection --box 2", "group --box 2",
                           "tree --box 3 --radius 8 --samples 50", "rotor --box 2 --aggregate 100",
                           "exact2d --n 8 --kernel-radius 20", "growth --mode relax --n 200",
                           "growth --mode divisible --mass 50", "growth --mode explode --n 10 --radius 30",
                           "growth --mode probe --dim 1 --sizes 10 100", "report"})
    CHECK_MESSAGE(run(args) == 0, args);
}

TEST_CASE("reruns are byte-identical and carry a manifest") {
  const auto a = fresh("a"), b = fresh("b");
  REQUIRE(run("sample --box 8 --samples 300 --seed 7 --out \"" + a.string() + "\"") == 0);
  REQUIRE(run("sample --box 8 --samples 300 --seed 7 --out \"" + b.string() + "\"", "", "SANDLAB_THREADS=2") == 0);
  for (const char* f : {"heights.csv", "heights.json"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  auto m = json::parse(slurp(a / "manifest.json"));
  CHECK(m["subcommand"] == "sample");
  CHECK(m["seed"] == 7);
  CHECK(m["flags"]["samples"] == "300");
  CHECK(m.contains("version"));
  CHECK(m.contains("tolerances"));
  CHECK(m.contains("started"));
  CHECK(m.contains("stopped"));
  const auto c = fresh("c");
  REQUIRE(run("sample --box 8 --samples 300 --seed 8 --out \"" + c.string() + "\"") == 0);
  CHECK(slurp(a / "heights.csv") != slurp(c / "heights.csv"));
}

TEST_CASE("identity image") {
  const auto d = fresh("group");
  REQUIRE(run("group --box 2 --out \"" + d.string() + "\"") == 0);
  CHECK(slurp(d / "identity.pgm") == sandlab::identity_image(2));
}

TEST_CASE("exact2d report") {
  const auto d = fresh("exact");
  REQUIRE(run("exact2d --report --n 16 --kernel-radius 40 --sum-radius 25 --mesh 16 --out \"" + d.string() + "\"") ==
          0);
  const auto j = json::parse(slurp(d / "exact2d.json"));
  CHECK(std::abs(j["kernel"]["A(0,-1)"].get<double>() - 0.25) < 1e-12);
  CHECK(std::abs(j["p0_determinant"]["value"].get<double>() - 0.0736) < 2e-3);
}
