#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace attrition::csv {

// RFC 4180 field splitting: quoted fields may contain commas and doubled quotes.
// Throws std::invalid_argument on an unterminated quote.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

// Fixed six-decimal rendering used by every exported table.
std::string fixed6(double v);

std::string join(const std::vector<std::string>& fields, char sep = ',');

// Writes text atomically enough for reports: creates parent directories and
// truncates any previous content. Throws DataError on I/O failure.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace attrition::csv

namespace attrition {

// SplitMix64 finaliser. Used to derive independent sub-seeds from a master seed
// so that parallel work units get fixed streams regardless of scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace attrition
