#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace spincant::io {

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t v);

}  // namespace spincant::io
