// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace failgen {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
// Throws Error(IoError) when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// Writes via a sibling temporary file and rename. Throws Error(IoError).
void write_file_atomic(const std::filesystem::path& path, std::string_view data);
std::string read_file(const std::filesystem::path& path);

}  // namespace failgen
