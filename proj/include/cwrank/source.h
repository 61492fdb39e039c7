#ifndef CWRANK_SOURCE_H_
#define CWRANK_SOURCE_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace cwrank {

// The nine fact-checking organizations, in label-column order, followed by
// the synthetic ANY source (logical OR of the nine). ANY never appears in
// input files.
enum class Source : std::size_t { CT, ABC, CNN, WP, NPR, PF, TG, NYT, FC, ANY };

inline constexpr std::size_t kNumSources = 9;

inline constexpr std::array<Source, kNumSources> kRealSources = {
    Source::CT,  Source::ABC, Source::CNN, Source::WP, Source::NPR,
    Source::PF,  Source::TG,  Source::NYT, Source::FC};

std::string_view source_name(Source s);

// Accepts the short codes ("CT", ..., "ANY"), case-sensitive.
std::optional<Source> parse_source(std::string_view name);

constexpr std::size_t column(Source s) { return static_cast<std::size_t>(s); }

}  // namespace cwrank

#endif  // CWRANK_SOURCE_H_
