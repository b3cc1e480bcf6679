#include "covlab/kernels.hpp"

#include <cassert>

namespace covlab::kernels {

namespace {

inline bool get_bit(const Word* a, std::size_t i) { return (a[i / 64] >> (i % 64)) & 1u; }
inline void set_bit(Word* a, std::size_t i) { a[i / 64] |= Word{1} << (i % 64); }

// Repeats a sub-word pattern of `width` bits (width divides 64) across a word.
inline Word tile_word(Word pattern, std::size_t width) {
  Word w = pattern;
  for (std::size_t span = width; span < 64; span *= 2) w |= w << span;
  return w;
}

}  // namespace

namespace serial {

void bit_and(const Word* a, const Word* b, Word* out, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = a[i] & b[i];
}
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = a[i] | b[i];
}
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = a[i] & ~b[i];
}
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = a[i] ^ b[i];
}
void bit_not(const Word* a, Word* out, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = ~a[i];
}
void fill(Word* out, std::size_t nw, Word value) {
  for (std::size_t i = 0; i < nw; ++i) out[i] = value;
}

bool equal(const Word* a, const Word* b, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i)
    if (a[i] != b[i]) return false;
  return true;
}
bool subset(const Word* a, const Word* b, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}
bool disjoint(const Word* a, const Word* b, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i)
    if (a[i] & b[i]) return false;
  return true;
}
bool any(const Word* a, std::size_t nw) {
  for (std::size_t i = 0; i < nw; ++i)
    if (a[i]) return true;
  return false;
}
std::size_t popcount(const Word* a, std::size_t nw) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < nw; ++i) c += static_cast<std::size_t>(__builtin_popcountll(a[i]));
  return c;
}
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nw) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < nw; ++i)
    c += static_cast<std::size_t>(__builtin_popcountll(a[i] & ~b[i]));
  return c;
}

void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out) {
  assert(block_bits > 0 && nbits % block_bits == 0);
  const std::size_t out_nw = words_for(block_bits);
  if (block_bits % 64 == 0) {
    const std::size_t bw = block_bits / 64;
    const std::size_t nblocks = nbits / block_bits;
    for (std::size_t w = 0; w < bw; ++w) {
      Word acc = 0;
      for (std::size_t j = 0; j < nblocks; ++j) acc |= src[j * bw + w];
      out[w] = acc;
    }
  } else if (64 % block_bits == 0) {
    Word acc = 0;
    const std::size_t nw = words_for(nbits);
    for (std::size_t i = 0; i < nw; ++i) acc |= src[i];
    for (std::size_t span = 32; span >= block_bits; span /= 2) acc |= acc >> span;
    out[0] = acc & tail_mask(block_bits);
  } else {
    for (std::size_t w = 0; w < out_nw; ++w) out[w] = 0;
    for (std::size_t i = 0; i < nbits; ++i)
      if (get_bit(src, i)) set_bit(out, i % block_bits);
  }
}

void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits) {
  assert(block_bits > 0 && nbits % block_bits == 0);
  const std::size_t nw = words_for(nbits);
  if (block_bits % 64 == 0) {
    const std::size_t bw = block_bits / 64;
    for (std::size_t i = 0; i < nw; ++i) out[i] = mask[i % bw];
  } else if (64 % block_bits == 0) {
    const Word w = tile_word(mask[0] & tail_mask(block_bits), block_bits);
    for (std::size_t i = 0; i < nw; ++i) out[i] = w;
    if (nbits % 64) out[nw - 1] &= tail_mask(nbits);
  } else {
    for (std::size_t i = 0; i < nw; ++i) out[i] = 0;
    for (std::size_t i = 0; i < nbits; ++i)
      if (get_bit(mask, i % block_bits)) set_bit(out, i);
  }
}

void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out) {
  const std::size_t nbits = src_bits * factor;
  const std::size_t nw = words_for(nbits);
  if (factor % 64 == 0) {
    const std::size_t fw = factor / 64;
    for (std::size_t j = 0; j < src_bits; ++j) {
      const Word v = get_bit(src, j) ? ~Word{0} : Word{0};
      for (std::size_t w = 0; w < fw; ++w) out[j * fw + w] = v;
    }
  } else if (64 % factor == 0) {
    const std::size_t per_word = 64 / factor;
    const Word unit = tail_mask(factor);
    for (std::size_t w = 0; w < nw; ++w) {
      Word v = 0;
      const std::size_t j0 = w * per_word;
      for (std::size_t k = 0; k < per_word && j0 + k < src_bits; ++k)
        if (get_bit(src, j0 + k)) v |= unit << (k * factor);
      out[w] = v;
    }
  } else {
    for (std::size_t i = 0; i < nw; ++i) out[i] = 0;
    for (std::size_t i = 0; i < nbits; ++i)
      if (get_bit(src, i / factor)) set_bit(out, i);
  }
}

void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out) {
  const std::size_t nw = words_for(nblocks);
  for (std::size_t w = 0; w < nw; ++w) {
    Word v = 0;
    const std::size_t j0 = w * 64;
    const std::size_t jhi = (j0 + 64 < nblocks) ? j0 + 64 : nblocks;
    for (std::size_t j = j0; j < jhi; ++j)
      if (get_bit(src, j * block_bits + offset)) v |= Word{1} << (j - j0);
    out[w] = v;
  }
}

void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit) {
  const std::size_t nw = words_for(nbits);
  const std::size_t period = stride_bits * radix;
  if (stride_bits % 64 == 0) {
    const std::size_t sw = stride_bits / 64;
    const std::size_t pw = sw * radix;
    for (std::size_t w = 0; w < nw; ++w)
      out[w] = ((w % pw) / sw == digit) ? ~Word{0} : Word{0};
  } else if (64 % period == 0) {
    const Word run = tail_mask(stride_bits) << (digit * stride_bits);
    const Word w = tile_word(run, period);
    for (std::size_t i = 0; i < nw; ++i) out[i] = w;
  } else {
    for (std::size_t i = 0; i < nw; ++i) out[i] = 0;
    for (std::size_t i = 0; i < nbits; ++i)
      if ((i / stride_bits) % radix == digit) set_bit(out, i);
  }
  if (nbits % 64) out[nw - 1] &= tail_mask(nbits);
}

bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits,
                     std::size_t radix) {
  const std::size_t period = stride_bits * radix;
  if (stride_bits % 64 == 0) {
    const std::size_t sw = stride_bits / 64;
    const std::size_t pw = sw * radix;
    const std::size_t nperiods = nbits / (period);
    for (std::size_t p = 0; p < nperiods; ++p)
      for (std::size_t v = 1; v < radix; ++v)
        if (!equal(x + p * pw, x + p * pw + v * sw, sw)) return false;
    return true;
  }
  if (64 % period == 0 && nbits % period == 0) {
    const Word lane0 = tile_word(tail_mask(stride_bits), period);
    const std::size_t nw = words_for(nbits);
    for (std::size_t i = 0; i < nw; ++i) {
      const Word w = x[i];
      for (std::size_t v = 1; v < radix; ++v)
        if (((w >> (v * stride_bits)) ^ w) & lane0) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < nbits; ++i) {
    const std::size_t base = i - (i / stride_bits % radix) * stride_bits;
    if (get_bit(x, i) != get_bit(x, base)) return false;
  }
  return true;
}

void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out) {
  const std::size_t nw = words_for(nbits);
  for (std::size_t w = 0; w < nw; ++w) {
    Word v = 0;
    const std::size_t i0 = w * 64;
    const std::size_t ihi = (i0 + 64 < nbits) ? i0 + 64 : nbits;
    for (std::size_t i = i0; i < ihi; ++i)
      if (get_bit(src, perm[i])) v |= Word{1} << (i - i0);
    out[w] = v;
  }
}

}  // namespace serial

namespace par {

void bit_and(const Word* a, const Word* b, Word* out, std::size_t nw) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = a[i] & b[i];
}
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nw) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = a[i] | b[i];
}
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nw) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = a[i] & ~b[i];
}
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nw) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = a[i] ^ b[i];
}
void bit_not(const Word* a, Word* out, std::size_t nw) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = ~a[i];
}
void fill(Word* out, std::size_t nw, Word value) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = value;
}

bool equal(const Word* a, const Word* b, std::size_t nw) {
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) ok = ok && (a[i] == b[i]);
  return ok;
}
bool subset(const Word* a, const Word* b, std::size_t nw) {
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i)
    ok = ok && !(a[i] & ~b[i]);
  return ok;
}
bool disjoint(const Word* a, const Word* b, std::size_t nw) {
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) ok = ok && !(a[i] & b[i]);
  return ok;
}
bool any(const Word* a, std::size_t nw) {
  bool found = false;
#pragma omp parallel for schedule(static) reduction(|| : found)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i)
    found = found || (a[i] != 0);
  return found;
}
std::size_t popcount(const Word* a, std::size_t nw) {
  std::size_t c = 0;
#pragma omp parallel for schedule(static) reduction(+ : c)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i)
    c += static_cast<std::size_t>(__builtin_popcountll(a[i]));
  return c;
}
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nw) {
  std::size_t c = 0;
#pragma omp parallel for schedule(static) reduction(+ : c)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i)
    c += static_cast<std::size_t>(__builtin_popcountll(a[i] & ~b[i]));
  return c;
}

void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out) {
  if (block_bits % 64 == 0) {
    const std::size_t bw = block_bits / 64;
    const std::size_t nblocks = nbits / block_bits;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(bw); ++w) {
      Word acc = 0;
      for (std::size_t j = 0; j < nblocks; ++j) acc |= src[j * bw + static_cast<std::size_t>(w)];
      out[w] = acc;
    }
  } else if (64 % block_bits == 0) {
    Word acc = 0;
    const std::size_t nw = words_for(nbits);
#pragma omp parallel for schedule(static) reduction(| : acc)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) acc |= src[i];
    for (std::size_t span = 32; span >= block_bits; span /= 2) acc |= acc >> span;
    out[0] = acc & tail_mask(block_bits);
  } else {
    serial::or_reduce_blocks(src, nbits, block_bits, out);
  }
}

void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (block_bits % 64 == 0) {
    const std::size_t bw = block_bits / 64;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i)
      out[i] = mask[static_cast<std::size_t>(i) % bw];
  } else if (64 % block_bits == 0) {
    const Word w = tile_word(mask[0] & tail_mask(block_bits), block_bits);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nw); ++i) out[i] = w;
    if (nbits % 64) out[nw - 1] &= tail_mask(nbits);
  } else {
    serial::broadcast_blocks(mask, block_bits, out, nbits);
  }
}

void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out) {
  if (factor % 64 == 0) {
    const std::size_t fw = factor / 64;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(src_bits); ++j) {
      const Word v = ((src[j / 64] >> (j % 64)) & 1u) ? ~Word{0} : Word{0};
      for (std::size_t w = 0; w < fw; ++w) out[static_cast<std::size_t>(j) * fw + w] = v;
    }
  } else if (64 % factor == 0) {
    const std::size_t nbits = src_bits * factor;
    const std::size_t nw = words_for(nbits);
    const std::size_t per_word = 64 / factor;
    const Word unit = tail_mask(factor);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(nw); ++w) {
      Word v = 0;
      const std::size_t j0 = static_cast<std::size_t>(w) * per_word;
      for (std::size_t k = 0; k < per_word && j0 + k < src_bits; ++k)
        if ((src[(j0 + k) / 64] >> ((j0 + k) % 64)) & 1u) v |= unit << (k * factor);
      out[w] = v;
    }
  } else {
    serial::stretch_bits(src, src_bits, factor, out);
  }
}

void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out) {
  const std::size_t nw = words_for(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(nw); ++w) {
    Word v = 0;
    const std::size_t j0 = static_cast<std::size_t>(w) * 64;
    const std::size_t jhi = (j0 + 64 < nblocks) ? j0 + 64 : nblocks;
    for (std::size_t j = j0; j < jhi; ++j) {
      const std::size_t bit = j * block_bits + offset;
      if ((src[bit / 64] >> (bit % 64)) & 1u) v |= Word{1} << (j - j0);
    }
    out[w] = v;
  }
}

void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit) {
  const std::size_t nw = words_for(nbits);
  if (stride_bits % 64 == 0) {
    const std::size_t sw = stride_bits / 64;
    const std::size_t pw = sw * radix;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(nw); ++w)
      out[w] = ((static_cast<std::size_t>(w) % pw) / sw == digit) ? ~Word{0} : Word{0};
    if (nbits % 64) out[nw - 1] &= tail_mask(nbits);
  } else {
    serial::fill_digit_eq(out, nbits, stride_bits, radix, digit);
  }
}

bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits,
                     std::size_t radix) {
  const std::size_t period = stride_bits * radix;
  if (stride_bits % 64 == 0) {
    const std::size_t sw = stride_bits / 64;
    const std::size_t pw = sw * radix;
    const std::size_t nperiods = nbits / period;
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nperiods); ++p) {
      bool local = true;
      for (std::size_t v = 1; v < radix && local; ++v)
        local = serial::equal(x + static_cast<std::size_t>(p) * pw,
                              x + static_cast<std::size_t>(p) * pw + v * sw, sw);
      ok = ok && local;
    }
    return ok;
  }
  return serial::digit_invariant(x, nbits, stride_bits, radix);
}

void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out) {
  const std::size_t nw = words_for(nbits);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(nw); ++w) {
    Word v = 0;
    const std::size_t i0 = static_cast<std::size_t>(w) * 64;
    const std::size_t ihi = (i0 + 64 < nbits) ? i0 + 64 : nbits;
    for (std::size_t i = i0; i < ihi; ++i) {
      const std::uint32_t s = perm[i];
      if ((src[s / 64] >> (s % 64)) & 1u) v |= Word{1} << (i - i0);
    }
    out[w] = v;
  }
}

}  // namespace par

#define COVLAB_DISPATCH(nbits, call_par, call_serial) \
  do {                                                \
    if ((nbits) >= kParBitThreshold) {                \
      call_par;                                       \
    } else {                                          \
      call_serial;                                    \
    }                                                 \
  } while (0)

void bit_and(const Word* a, const Word* b, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::bit_and(a, b, out, nw), serial::bit_and(a, b, out, nw));
}
void bit_or(const Word* a, const Word* b, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::bit_or(a, b, out, nw), serial::bit_or(a, b, out, nw));
}
void bit_andnot(const Word* a, const Word* b, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::bit_andnot(a, b, out, nw), serial::bit_andnot(a, b, out, nw));
}
void bit_xor(const Word* a, const Word* b, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::bit_xor(a, b, out, nw), serial::bit_xor(a, b, out, nw));
}
void bit_not(const Word* a, Word* out, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::bit_not(a, out, nw), serial::bit_not(a, out, nw));
}
void fill(Word* out, std::size_t nbits, Word value) {
  const std::size_t nw = words_for(nbits);
  COVLAB_DISPATCH(nbits, par::fill(out, nw, value), serial::fill(out, nw, value));
}
bool equal(const Word* a, const Word* b, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::equal(a, b, nw);
  return serial::equal(a, b, nw);
}
bool subset(const Word* a, const Word* b, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::subset(a, b, nw);
  return serial::subset(a, b, nw);
}
bool disjoint(const Word* a, const Word* b, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::disjoint(a, b, nw);
  return serial::disjoint(a, b, nw);
}
bool any(const Word* a, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::any(a, nw);
  return serial::any(a, nw);
}
std::size_t popcount(const Word* a, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::popcount(a, nw);
  return serial::popcount(a, nw);
}
std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t nbits) {
  const std::size_t nw = words_for(nbits);
  if (nbits >= kParBitThreshold) return par::popcount_andnot(a, b, nw);
  return serial::popcount_andnot(a, b, nw);
}
void or_reduce_blocks(const Word* src, std::size_t nbits, std::size_t block_bits, Word* out) {
  COVLAB_DISPATCH(nbits, par::or_reduce_blocks(src, nbits, block_bits, out),
                  serial::or_reduce_blocks(src, nbits, block_bits, out));
}
void broadcast_blocks(const Word* mask, std::size_t block_bits, Word* out, std::size_t nbits) {
  COVLAB_DISPATCH(nbits, par::broadcast_blocks(mask, block_bits, out, nbits),
                  serial::broadcast_blocks(mask, block_bits, out, nbits));
}
void stretch_bits(const Word* src, std::size_t src_bits, std::size_t factor, Word* out) {
  COVLAB_DISPATCH(src_bits * factor, par::stretch_bits(src, src_bits, factor, out),
                  serial::stretch_bits(src, src_bits, factor, out));
}
void gather_stride(const Word* src, std::size_t nblocks, std::size_t block_bits,
                   std::size_t offset, Word* out) {
  COVLAB_DISPATCH(nblocks, par::gather_stride(src, nblocks, block_bits, offset, out),
                  serial::gather_stride(src, nblocks, block_bits, offset, out));
}
void fill_digit_eq(Word* out, std::size_t nbits, std::size_t stride_bits, std::size_t radix,
                   std::size_t digit) {
  COVLAB_DISPATCH(nbits, par::fill_digit_eq(out, nbits, stride_bits, radix, digit),
                  serial::fill_digit_eq(out, nbits, stride_bits, radix, digit));
}
bool digit_invariant(const Word* x, std::size_t nbits, std::size_t stride_bits,
                     std::size_t radix) {
  if (nbits >= kParBitThreshold) return par::digit_invariant(x, nbits, stride_bits, radix);
  return serial::digit_invariant(x, nbits, stride_bits, radix);
}
void gather_map(const Word* src, const std::uint32_t* perm, std::size_t nbits, Word* out) {
  COVLAB_DISPATCH(nbits, par::gather_map(src, perm, nbits, out),
                  serial::gather_map(src, perm, nbits, out));
}

#undef COVLAB_DISPATCH

}  // namespace covlab::kernels
