#include "cleanse/bit_vector.hpp"

#include <bit>

#include "cleanse/error.hpp"

namespace cleanse {

namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitVector::BitVector(std::size_t size) : size_(size), words_(word_count(size), 0) {}

BitVector::BitVector(std::initializer_list<int> bits) : BitVector(bits.size()) {
  std::size_t i = 0;
  for (int b : bits) set(i++, b != 0);
}

BitVector BitVector::from_bits(const std::vector<int>& bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
  return v;
}

BitVector BitVector::from_integer(std::uint64_t value, std::size_t size) {
  if (size > 64) throw Error("BitVector::from_integer: size exceeds 64 bits");
  BitVector v(size);
  if (size > 0) v.words_[0] = value;
  v.clear_padding();
  return v;
}

BitVector BitVector::ones(std::size_t size) {
  BitVector v(size);
  for (auto& w : v.words_) w = ~0ULL;
  v.clear_padding();
  return v;
}

BitVector BitVector::random(std::size_t size, Rng& rng) {
  BitVector v(size);
  for (auto& w : v.words_) w = rng.next_u64();
  v.clear_padding();
  return v;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t size) {
  if (hex.size() != (size + 3) / 4) {
    throw Error("BitVector::from_hex: expected " + std::to_string((size + 3) / 4) +
                " hex digits, got " + std::to_string(hex.size()));
  }
  BitVector v(size);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const int value = hex_value(hex[hex.size() - 1 - d]);
    if (value < 0) throw Error("BitVector::from_hex: invalid digit in '" + std::string(hex) + "'");
    for (int b = 0; b < 4; ++b) {
      const std::size_t pos = 4 * d + b;
      if ((value >> b) & 1) {
        if (pos >= size) throw Error("BitVector::from_hex: bit set beyond size");
        v.set(pos);
      }
    }
  }
  return v;
}

bool BitVector::test(std::size_t i) const {
  if (i >= size_) throw Error("BitVector: index out of range");
  return (*this)[i];
}

void BitVector::set(std::size_t i, bool value) {
  if (i >= size_) throw Error("BitVector: index out of range");
  const std::uint64_t mask = 1ULL << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void BitVector::flip(std::size_t i) {
  if (i >= size_) throw Error("BitVector: index out of range");
  words_[i >> 6] ^= 1ULL << (i & 63);
}

std::size_t BitVector::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

BitVector BitVector::complement() const {
  BitVector v = *this;
  for (auto& w : v.words_) w = ~w;
  v.clear_padding();
  return v;
}

std::vector<int> BitVector::to_bits() const {
  std::vector<int> bits(size_);
  for (std::size_t i = 0; i < size_; ++i) bits[i] = (*this)[i] ? 1 : 0;
  return bits;
}

std::string BitVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = (size_ + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    int value = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t pos = 4 * d + b;
      if (pos < size_ && (*this)[pos]) value |= 1 << b;
    }
    out[digits - 1 - d] = kDigits[value];
  }
  return out;
}

std::string BitVector::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if ((*this)[i]) out[i] = '1';
  }
  return out;
}

void BitVector::clear_padding() {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (1ULL << (size_ % 64)) - 1;
  }
}

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw Error("hamming_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    d += static_cast<std::size_t>(std::popcount(a.words()[w] ^ b.words()[w]));
  }
  return d;
}

std::size_t BitVectorHash::operator()(const BitVector& v) const noexcept {
  std::uint64_t h = mix_seed(v.size());
  for (auto w : v.words()) h = mix_seed(h ^ w);
  return static_cast<std::size_t>(h);
}

}  // namespace cleanse
