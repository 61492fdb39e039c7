#include "cwrank/source.h"

namespace cwrank {
namespace {

constexpr std::array<std::string_view, kNumSources + 1> kNames = {
    "CT", "ABC", "CNN", "WP", "NPR", "PF", "TG", "NYT", "FC", "ANY"};

}  // namespace

std::string_view source_name(Source s) { return kNames[column(s)]; }

std::optional<Source> parse_source(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Source>(i);
  }
  return std::nullopt;
}

}  // namespace cwrank
