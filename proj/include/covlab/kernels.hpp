#pragma once

// Word-level kernels for the clopen-set bit vectors. Every kernel has a
// serial reference implementation (namespace serial) and an OpenMP variant
// (namespace par) that must produce bit-identical results; the unqualified
// entry points dispatch on input size. Callers hold the invariant that
// unused high bits of the last word are zero.

#include <cstddef>
#include <cstdint>

namespace covlab::kernels {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for(std::size_t nbits) { return (nbits + kWordBits - 1) / kWordBits; }

inline Word tail_mask(std::size_t nbits) {
  const std::size_t rem = nbits % kWordBits;
  return rem == 0 ? ~Word{0} : ((Word{1} << rem) - 1);
}

// Bits crossing this size get the OpenMP path.
inline constexpr std::size_t kParBitThreshold = std::size_t{1} << 21;

namespace serial {

void bit_and(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_not(const Word* a, Word* out, std::size_t nw);
void fill(Word* out, std::size_t nw, Word value);

bool equal(const Word* a, const Word* b, std::size_t nw);
bool subset(const Word* a, const Word* b, std::size_t nw);  // a & ~b == 0
bool disjoint(const Word* a, const Word* b, std::size_t nw);
bool any(const Word* a, std::size_t nw);
std::size_t popcount(const Word* a, std::size_t nw);
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nw);

// OR of all length-`block_bits` blocks of src (nbits divisible by block_bits).
void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out);
// Tile `mask` (block_bits long) across out (nbits long).
void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits);
// out bit i = src bit (i / factor); out has src_bits*factor bits.
void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out);
// out bit j = src bit (j*block_bits + offset), j < nblocks.
void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out);
// Set bits i with (i / stride_bits) % radix == digit.
void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit);
// True iff membership never depends on the digit at this stride.
bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits, std::size_t radix);
// out bit i = src bit perm[i]  (gather through an index map).
void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out);

}  // namespace serial

namespace par {

void bit_and(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nw);
void bit_not(const Word* a, Word* out, std::size_t nw);
void fill(Word* out, std::size_t nw, Word value);

bool equal(const Word* a, const Word* b, std::size_t nw);
bool subset(const Word* a, const Word* b, std::size_t nw);
bool disjoint(const Word* a, const Word* b, std::size_t nw);
bool any(const Word* a, std::size_t nw);
std::size_t popcount(const Word* a, std::size_t nw);
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nw);

void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out);
void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits);
void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out);
void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out);
void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit);
bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits, std::size_t radix);
void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out);

}  // namespace par

// Size-dispatching entry points.
void bit_and(const Word* a, const Word* b, Word* out, std::size_t nbits);
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nbits);
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nbits);
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nbits);
void bit_not(const Word* a, Word* out, std::size_t nbits);
void fill(Word* out, std::size_t nbits, Word value);
bool equal(const Word* a, const Word* b, std::size_t nbits);
bool subset(const Word* a, const Word* b, std::size_t nbits);
bool disjoint(const Word* a, const Word* b, std::size_t nbits);
bool any(const Word* a, std::size_t nbits);
std::size_t popcount(const Word* a, std::size_t nbits);
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nbits);
void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out);
void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits);
void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out);
void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out);
void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit);
bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits, std::size_t radix);
void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out);

}  // namespace covlab::kernels
