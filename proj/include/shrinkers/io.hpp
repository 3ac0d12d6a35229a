#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "shrinkers/errors.hpp"

namespace shrinkers {

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void writeFileAtomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path);
  }
}

}  // namespace shrinkers
