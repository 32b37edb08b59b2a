#include "memwalk/cli/output.hpp"

#include "memwalk/core.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace memwalk::cli {

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ArgumentError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::function<void(std::ostream&)>& body) {
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ArgumentError("cannot write " + path.string());
  }
  body(out);
  out.flush();
  if (!out) {
    throw ArgumentError("write failed for " + path.string());
  }
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  write_file(dir, name, [&](std::ostream& out) { out << text; });
}

std::string compact_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

}  // namespace memwalk::cli
