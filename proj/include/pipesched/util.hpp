#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pipesched {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace pipesched
