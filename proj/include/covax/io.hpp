#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace covax {

namespace fs = std::filesystem;

/// 12 significant digits, shortest general form ('.' separator, exponent only
/// outside [1e-4, 1e12)).
inline std::string format_decimal(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

/// Round-trip precision; used wherever output must be reproducible bit-for-bit.
inline std::string format_exact(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Value as it will read back after a save/load cycle.
inline double quantize_decimal(double value) {
  const std::string text = format_decimal(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

inline std::optional<double> parse_decimal(std::string_view text) {
  double out = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return out;
}

struct TsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a tab-separated file, skipping blank lines and '#' comments.
inline std::vector<TsvRow> read_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path.filename().string() + ": cannot open file");
  }
  std::vector<TsvRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    TsvRow row{number, {}};
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      row.fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Writes to a temporary sibling and renames over the target.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error(path.string() + ": rename failed");
  }
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace covax
