#include "covlab/kernels.hpp"

#include <vector>

#include "covlab/bitvec.hpp"
#include "covlab/rng.hpp"
#include "doctest.h"

using namespace covlab;
using kernels::Word;

namespace {

Bitvec random_bits(Rng& rng, std::size_t nbits, std::uint32_t density_pct = 50) {
  Bitvec b(nbits);
  for (std::size_t i = 0; i < nbits; ++i)
    if (rng.below(100) < density_pct) b.set(i);
  return b;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  Rng rng(0xC0FFEE);
  for (std::size_t nbits : {64u, 128u, 4096u, 64u * 64u, 2048u * 64u}) {
    const std::size_t nw = kernels::words_for(nbits);
    Bitvec a = random_bits(rng, nbits);
    Bitvec b = random_bits(rng, nbits);
    Bitvec s(nbits), p(nbits);

    kernels::serial::bit_and(a.data(), b.data(), s.data(), nw);
    kernels::par::bit_and(a.data(), b.data(), p.data(), nw);
    CHECK(s == p);
    kernels::serial::bit_or(a.data(), b.data(), s.data(), nw);
    kernels::par::bit_or(a.data(), b.data(), p.data(), nw);
    CHECK(s == p);
    kernels::serial::bit_andnot(a.data(), b.data(), s.data(), nw);
    kernels::par::bit_andnot(a.data(), b.data(), p.data(), nw);
    CHECK(s == p);
    CHECK(kernels::serial::popcount(a.data(), nw) == kernels::par::popcount(a.data(), nw));
    CHECK(kernels::serial::subset(a.data(), b.data(), nw) ==
          kernels::par::subset(a.data(), b.data(), nw));
    CHECK(kernels::serial::disjoint(a.data(), b.data(), nw) ==
          kernels::par::disjoint(a.data(), b.data(), nw));

    for (std::size_t block : {std::size_t{1}, std::size_t{2}, std::size_t{8}, std::size_t{64},
                              std::size_t{1024}}) {
      if (nbits % block != 0 || block > nbits) continue;
      Bitvec rs(block), rp(block);
      kernels::serial::or_reduce_blocks(a.data(), nbits, block, rs.data());
      kernels::par::or_reduce_blocks(a.data(), nbits, block, rp.data());
      CHECK(rs == rp);
      Bitvec bs(nbits), bp(nbits);
      kernels::serial::broadcast_blocks(rs.data(), block, bs.data(), nbits);
      kernels::par::broadcast_blocks(rs.data(), block, bp.data(), nbits);
      CHECK(bs == bp);
      const std::size_t nblocks = nbits / block;
      Bitvec src = random_bits(rng, nblocks);
      Bitvec ss(nbits), sp(nbits);
      kernels::serial::stretch_bits(src.data(), nblocks, block, ss.data());
      kernels::par::stretch_bits(src.data(), nblocks, block, sp.data());
      CHECK(ss == sp);
      Bitvec gs(nblocks), gp(nblocks);
      const std::size_t off = rng.below(block);
      kernels::serial::gather_stride(a.data(), nblocks, block, off, gs.data());
      kernels::par::gather_stride(a.data(), nblocks, block, off, gp.data());
      CHECK(gs == gp);
    }
  }
}

TEST_CASE("block reduce and broadcast agree with the naive model") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t block = std::size_t{1} << rng.below(8);   // 1..128
    const std::size_t nblocks = 1 + rng.below(50);
    const std::size_t nbits = block * nblocks;
    Bitvec src = random_bits(rng, nbits, 20);

    Bitvec reduced(block);
    kernels::or_reduce_blocks(src.data(), nbits, block, reduced.data());
    for (std::size_t r = 0; r < block; ++r) {
      bool expect = false;
      for (std::size_t j = 0; j < nblocks; ++j) expect = expect || src.test(j * block + r);
      CHECK(reduced.test(r) == expect);
    }

    Bitvec tiled(nbits);
    kernels::broadcast_blocks(reduced.data(), block, tiled.data(), nbits);
    for (std::size_t i = 0; i < nbits; ++i) CHECK(tiled.test(i) == reduced.test(i % block));

    Bitvec col(nblocks);
    const std::size_t off = rng.below(block);
    kernels::gather_stride(src.data(), nblocks, block, off, col.data());
    for (std::size_t j = 0; j < nblocks; ++j) CHECK(col.test(j) == src.test(j * block + off));

    Bitvec wide(nbits);
    kernels::stretch_bits(col.data(), nblocks, block, wide.data());
    for (std::size_t i = 0; i < nbits; ++i) CHECK(wide.test(i) == col.test(i / block));
  }
}

TEST_CASE("digit fill and invariance agree with the naive model") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t stride = std::size_t{1} << rng.below(8);
    const std::size_t radix = std::size_t{2} << rng.below(4);
    const std::size_t periods = 1 + rng.below(20);
    const std::size_t nbits = stride * radix * periods;
    const std::size_t digit = rng.below(radix);

    Bitvec mask(nbits);
    kernels::fill_digit_eq(mask.data(), nbits, stride, radix, digit);
    for (std::size_t i = 0; i < nbits; ++i)
      CHECK(mask.test(i) == ((i / stride) % radix == digit));

    CHECK(kernels::digit_invariant(mask.data(), nbits, stride, radix) == (radix == 1));
    Bitvec flat(nbits);
    kernels::fill_digit_eq(flat.data(), nbits, stride * radix, 1, 0);
    CHECK(kernels::digit_invariant(flat.data(), nbits, stride, radix));

    Bitvec rnd = random_bits(rng, nbits);
    bool expect = true;
    for (std::size_t i = 0; i < nbits && expect; ++i) {
      const std::size_t base = i - ((i / stride) % radix) * stride;
      expect = rnd.test(i) == rnd.test(base);
    }
    CHECK(kernels::digit_invariant(rnd.data(), nbits, stride, radix) == expect);
  }
}

TEST_CASE("gather_map routes bits through an index map") {
  Rng rng(11);
  const std::size_t nbits = 777;
  Bitvec src = random_bits(rng, nbits);
  std::vector<std::uint32_t> perm(nbits);
  for (std::size_t i = 0; i < nbits; ++i) perm[i] = static_cast<std::uint32_t>(rng.below(nbits));
  Bitvec out(nbits);
  kernels::gather_map(src.data(), perm.data(), nbits, out.data());
  for (std::size_t i = 0; i < nbits; ++i) CHECK(out.test(i) == src.test(perm[i]));
}
