#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ndevoi::csv {

// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double v);

// Fixed 12-significant-digit representation for tabulated curve exports.
std::string format_sig12(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Renders header + rows, comma-separated, '\n' line endings.
std::string render(const Table& table);

// Writes content to a temporary file in the target directory, then renames it
// over the destination, so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace ndevoi::csv
