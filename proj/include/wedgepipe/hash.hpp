#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace wedgepipe {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's contents. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace wedgepipe
