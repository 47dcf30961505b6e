#pragma once

#include <functional>
#include <istream>

#include <freqsketch/core.hpp>

namespace freqsketch::cli {

/// Reads `key<TAB>value` lines (value optional, default 1) and calls `sink` per element.
/// Blank lines are skipped; a trailing CR is ignored. Malformed lines throw a
/// line-numbered ParseError. Returns the element count.
std::size_t read_tsv(std::istream& in, const std::function<void(const Element&)>& sink);

}  // namespace freqsketch::cli
