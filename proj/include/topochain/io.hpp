#pragma once

// CSV and JSON emission.  Doubles are written with std::to_chars at 17
// significant digits: locale-independent, round-trip exact, and byte-stable
// across runs, which the golden-file regression tests rely on.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "topochain/errors.hpp"

namespace topochain::io {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw IoError("failed to format double");
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from '" + path.string() + "' failed");
  return ss.str();
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw IoError("csv row width " + std::to_string(row.size()) + " does not match header width " +
                    std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("output path '" + dir.string() + "' is not a directory");
  }
}

}  // namespace topochain::io
