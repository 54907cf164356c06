#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace bcn {

// File names (not paths) of the .ppm images in a directory, sorted so
// corpus iteration order is reproducible.
inline std::vector<std::string> list_ppm_files(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorKind::data, "corpus directory not found: " + dir);
  std::vector<std::string> names;
  for (const fs::directory_entry& de : fs::directory_iterator(dir)) {
    if (de.is_regular_file() && de.path().extension() == ".ppm") {
      names.push_back(de.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot open " + path);
  f.seekg(0, std::ios::end);
  std::streamoff n = f.tellg();
  f.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(bytes.data()), n);
  if (!f) fail(ErrorKind::io, "cannot read " + path);
  return bytes;
}

inline void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::io, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::io, "cannot write " + path);
}

}  // namespace bcn
