#pragma once

#include <string>

namespace cir::util {

/// Writes the whole file through a temp-file + rename so readers never see a
/// truncated artifact. Content may be binary.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

void ensure_directory(const std::string& path);

} // namespace cir::util
