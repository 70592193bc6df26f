#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"
#include "sandlab/io.hpp"

using namespace sandlab;

namespace {

std::vector<std::int64_t> parse_pgm(const std::string& s, int& w, int& h, std::int64_t& maxval) {
  std::istringstream in(s);
  std::string magic;
  in >> magic >> w >> h >> maxval;
  REQUIRE(magic == "P2");
  std::vector<std::int64_t> v(std::size_t(w) * h);
  for (auto& x : v) in >> x;
  REQUIRE(in);
  std::int64_t extra;
  CHECK_FALSE(static_cast<bool>(in >> extra));
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("pgm round trip") {
  const std::vector<std::int64_t> px{0, 1, 2, 3, 4, 5};
  const auto s = pgm_string(3, 2, px, 5);
  CHECK(s.rfind("P2\n3 2\n5\n", 0) == 0);
  int w, h;
  std::int64_t mv;
  CHECK(parse_pgm(s, w, h, mv) == px);
  CHECK(w == 3);
  CHECK(h == 2);
  CHECK_THROWS_AS(pgm_string(2, 2, px, 5), InvalidArgument);
  CHECK_THROWS_AS(pgm_string(3, 2, px, 4), InvalidArgument);
  CHECK_THROWS_AS(pgm_string(0, 1, {}, 1), InvalidArgument);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_row({"x", "1,5", ""}) == "x,\"1,5\",\r\n");
}

TEST_CASE("doubles round trip through text") {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0736362}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / "sandlab_io_test";
  std::filesystem::remove_all(dir);
  ensure_directory(dir.string());
  const auto path = join_path(dir.string(), "out.txt");
  atomic_write(path, "first");
  atomic_write(path, "second");
  CHECK(slurp(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("identity image") {
  int w, h;
  std::int64_t mv;
  auto zero = parse_pgm(identity_image(0), w, h, mv);
  CHECK(w == 1);
  CHECK(h == 1);
  CHECK(zero == std::vector<std::int64_t>{0});
  auto px = parse_pgm(identity_image(2), w, h, mv);
  REQUIRE(w == 5);
  REQUIRE(h == 5);
  auto g = wired_box(2, 2);
  const auto id = group_identity(g);
  for (int x = 0; x < g.size(); ++x) {
    const auto c = g.coord(x);
    CHECK(px[std::size_t(c[1] + 2) * 5 + std::size_t(c[0] + 2)] == id[x]);
  }
  CHECK_THROWS_AS(identity_image(201), SizeError);
  CHECK_THROWS_AS(identity_image(-1), InvalidArgument);
}

TEST_CASE("timestamps look like UTC ISO 8601") {
  const auto t = utc_timestamp();
  CHECK(t.size() >= 20);
  CHECK(t.back() == 'Z');
  CHECK(t[4] == '-');
  CHECK(t[10] == 'T');
}

}
