#include "sandlab/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"

namespace sandlab {

std::string pgm_string(int width, int height, const std::vector<std::int64_t>& values, std::int64_t maxval) {
  if (width < 1 || height < 1) throw InvalidArgument("image must be nonempty");
  if (values.size() != std::size_t(width) * std::size_t(height)) throw InvalidArgument("pixel count mismatch");
  if (maxval < 1) maxval = 1;
  if (maxval > 65535) throw InvalidArgument("PGM maxval above 65535");
  std::ostringstream os;
  os << "P2\n" << width << ' ' << height << '\n' << maxval << '\n';
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::int64_t v = values[std::size_t(r) * width + c];
      if (v < 0 || v > maxval) throw InvalidArgument("pixel value outside [0, maxval]");
      os << (c ? " " : "") << v;
    }
    os << '\n';
  }
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw InvalidArgument("cannot create directory " + path + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return (std::filesystem::path(dir) / name).string();
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot open " + tmp + " for writing");
    f << content;
    f.flush();
    if (!f) throw InvalidArgument("write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidArgument("cannot rename " + tmp + ": " + ec.message());
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string identity_image(int n) {
  if (n < 0) throw InvalidArgument("box size must be nonnegative");
  if (n > 200) throw SizeError("identity image limited to n <= 200");
  const SinkedMultigraph g = wired_box(n, 2);
  const Sandpile id = group_identity(g);
  if (group_add(g, id, id) != id) throw InvariantViolation("identity is not idempotent");
  const int side = 2 * n + 1;
  std::vector<std::int64_t> px(std::size_t(side) * side);
  for (int x = 0; x < g.size(); ++x) {
    auto c = g.coord(x);
    px[std::size_t(c[1] + n) * side + (c[0] + n)] = id[x];
  }
  return pgm_string(side, side, px, 3);
}

}  // namespace sandlab
