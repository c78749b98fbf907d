#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Independent RFC 1951 reference: zlib in raw-deflate mode. Test-only.
namespace oracle {

std::vector<std::uint8_t> zlib_deflate_raw(std::span<const std::uint8_t> input, int level = 6);

// nullopt when zlib rejects the stream or it does not end cleanly.
std::optional<std::vector<std::uint8_t>> zlib_inflate_raw(std::span<const std::uint8_t> input);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace oracle
