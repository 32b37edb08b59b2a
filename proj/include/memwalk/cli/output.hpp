#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace memwalk::cli {

/// Creates the directory (and parents) when missing; ArgumentError when that fails.
void ensure_directory(const std::filesystem::path& dir);

/// Writes `dir / name` in binary mode ('\n' line endings on every platform).
void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::function<void(std::ostream&)>& body);

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// Short decimal for file names and labels: 1, 2.5, 0.125.
std::string compact_number(double value);

}  // namespace memwalk::cli
