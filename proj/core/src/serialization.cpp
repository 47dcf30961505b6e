#include "freqsketch/serialization.hpp"

#include "freqsketch/error.hpp"

namespace freqsketch {

void ByteReader::need(std::size_t n) const {
  if (n > size_ - pos_) throw ParseError("truncated sketch data");
}

std::uint64_t ByteReader::get(int n) {
  need(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(n);
  return v;
}

std::string ByteReader::raw(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> ByteReader::bytes() {
  const std::uint64_t n = u64();
  need(n);
  std::vector<std::uint8_t> b(data_ + pos_, data_ + pos_ + n);
  pos_ += n;
  return b;
}

void ByteReader::expect(std::string_view magic) {
  if (raw(magic.size()) != magic) throw ParseError("bad magic: expected '" + std::string(magic) + "'");
}

}  // namespace freqsketch
