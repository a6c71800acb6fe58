#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "cleanse/rng.hpp"

namespace cleanse {

/// Fixed-length packed bit-vector. Used for instance inputs and for
/// selection masks over the training set.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size);
  BitVector(std::initializer_list<int> bits);

  static BitVector from_bits(const std::vector<int>& bits);
  /// Bits of `value`, bit i of the integer becoming position i. size <= 64.
  static BitVector from_integer(std::uint64_t value, std::size_t size);
  static BitVector ones(std::size_t size);
  static BitVector random(std::size_t size, Rng& rng);

  /// Parses the big-endian hex form produced by to_hex().
  static BitVector from_hex(std::string_view hex, std::size_t size);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool operator[](std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }
  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i);

  std::size_t count() const;
  BitVector complement() const;
  std::vector<int> to_bits() const;

  /// Big-endian hex, ceil(size/4) digits; position 0 is the least
  /// significant bit of the last digit.
  std::string to_hex() const;
  /// "0101..." with position 0 first.
  std::string to_string() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void clear_padding();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const BitVector& a, const BitVector& b);

struct BitVectorHash {
  std::size_t operator()(const BitVector& v) const noexcept;
};

}  // namespace cleanse
