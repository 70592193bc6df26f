#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sandlab {

// ASCII PGM (P2). values are row-major, width * height entries.
std::string pgm_string(int width, int height, const std::vector<std::int64_t>& values, std::int64_t maxval);

// RFC 4180 quoting: fields with a comma, quote or line break are quoted.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

// %.17g, enough to round-trip a double.
std::string format_double(double v);

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);
std::string join_path(const std::string& dir, const std::string& name);

std::string utc_timestamp();

// PGM of the recurrent identity of the wired box [-n, n]^2, rows running
// along the second coordinate. Checks I + I = I first.
std::string identity_image(int n);

}  // namespace sandlab
