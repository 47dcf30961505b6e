#include "freqsketch_cli/tsv.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include <freqsketch/error.hpp>

namespace freqsketch::cli {

std::size_t read_tsv(std::istream& in, const std::function<void(const Element&)>& sink) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t count = 0;
  Element e;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    e.key.assign(line, 0, tab);
    if (e.key.empty()) throw ParseError("empty key", lineno);
    e.value = 1.0;
    if (tab != std::string::npos) {
      const char* first = line.data() + tab + 1;
      const char* last = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(first, last, e.value);
      if (first == last || ec != std::errc() || ptr != last) {
        throw ParseError("bad value '" + std::string(first, last) + "'", lineno);
      }
      if (!std::isfinite(e.value) || !(e.value > 0.0)) {
        throw ParseError("value must be finite and > 0, got '" + std::string(first, last) + "'", lineno);
      }
    }
    sink(e);
    ++count;
  }
  if (in.bad()) throw Error("read error after line " + std::to_string(lineno));
  return count;
}

}  // namespace freqsketch::cli
