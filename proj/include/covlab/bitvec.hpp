#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "covlab/kernels.hpp"

namespace covlab {

// Fixed-length bit vector with value semantics. Unused high bits of the last
// word are kept zero so word-level kernels can compare and reduce freely.
class Bitvec {
 public:
  Bitvec() = default;
  explicit Bitvec(std::size_t nbits, bool value = false)
      : nbits_(nbits), words_(kernels::words_for(nbits), value ? ~kernels::Word{0} : 0) {
    trim();
  }

  std::size_t size() const { return nbits_; }
  std::size_t word_count() const { return words_.size(); }
  const kernels::Word* data() const { return words_.data(); }
  kernels::Word* data() { return words_.data(); }

  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const kernels::Word m = kernels::Word{1} << (i % 64);
    if (v)
      words_[i / 64] |= m;
    else
      words_[i / 64] &= ~m;
  }

  void set_all() { kernels::fill(words_.data(), nbits_, ~kernels::Word{0}); trim(); }
  void clear_all() { kernels::fill(words_.data(), nbits_, 0); }

  std::size_t count() const { return kernels::popcount(words_.data(), nbits_); }
  bool none() const { return !kernels::any(words_.data(), nbits_); }
  bool all() const { return count() == nbits_; }

  // First set bit, or size() when empty.
  std::size_t find_first() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w]));
    return nbits_;
  }

  friend Bitvec operator&(const Bitvec& a, const Bitvec& b) {
    Bitvec r(a.nbits_);
    kernels::bit_and(a.data(), b.data(), r.data(), a.nbits_);
    return r;
  }
  friend Bitvec operator|(const Bitvec& a, const Bitvec& b) {
    Bitvec r(a.nbits_);
    kernels::bit_or(a.data(), b.data(), r.data(), a.nbits_);
    return r;
  }
  friend Bitvec operator-(const Bitvec& a, const Bitvec& b) {
    Bitvec r(a.nbits_);
    kernels::bit_andnot(a.data(), b.data(), r.data(), a.nbits_);
    return r;
  }
  friend Bitvec operator^(const Bitvec& a, const Bitvec& b) {
    Bitvec r(a.nbits_);
    kernels::bit_xor(a.data(), b.data(), r.data(), a.nbits_);
    return r;
  }
  Bitvec operator~() const {
    Bitvec r(nbits_);
    kernels::bit_not(data(), r.data(), nbits_);
    r.trim();
    return r;
  }
  Bitvec& operator|=(const Bitvec& o) {
    kernels::bit_or(data(), o.data(), data(), nbits_);
    return *this;
  }
  Bitvec& operator&=(const Bitvec& o) {
    kernels::bit_and(data(), o.data(), data(), nbits_);
    return *this;
  }

  friend bool operator==(const Bitvec& a, const Bitvec& b) {
    return a.nbits_ == b.nbits_ && kernels::equal(a.data(), b.data(), a.nbits_);
  }
  bool subset_of(const Bitvec& o) const { return kernels::subset(data(), o.data(), nbits_); }
  bool disjoint_with(const Bitvec& o) const {
    return kernels::disjoint(data(), o.data(), nbits_);
  }
  bool intersects(const Bitvec& o) const { return !disjoint_with(o); }

  // Hex serialization: byte i holds bits [8i, 8i+8), low nibble second.
  std::string to_hex() const;
  static Bitvec from_hex(std::size_t nbits, const std::string& hex);

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (kernels::Word w : words_) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return h ^ nbits_;
  }

  void trim() {
    if (!words_.empty()) words_.back() &= kernels::tail_mask(nbits_);
  }

 private:
  std::size_t nbits_ = 0;
  std::vector<kernels::Word> words_;
};

inline std::string Bitvec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  const std::size_t nbytes = (nbits_ + 7) / 8;
  std::string s;
  s.reserve(nbytes * 2);
  for (std::size_t b = 0; b < nbytes; ++b) {
    const unsigned byte = static_cast<unsigned>((words_[b / 8] >> ((b % 8) * 8)) & 0xFF);
    s.push_back(digits[byte >> 4]);
    s.push_back(digits[byte & 0xF]);
  }
  return s;
}

inline Bitvec Bitvec::from_hex(std::size_t nbits, const std::string& hex) {
  const std::size_t nbytes = (nbits + 7) / 8;
  if (hex.size() != nbytes * 2) throw std::invalid_argument("bitvec hex length mismatch");
  auto nib = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw std::invalid_argument("bad hex digit");
  };
  Bitvec r(nbits);
  for (std::size_t b = 0; b < nbytes; ++b) {
    const kernels::Word byte = nib(hex[2 * b]) * 16 + nib(hex[2 * b + 1]);
    r.words_[b / 8] |= byte << ((b % 8) * 8);
  }
  r.trim();
  return r;
}

}  // namespace covlab
