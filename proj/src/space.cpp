#include "covlab/space.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace covlab {

SpaceCtx::SpaceCtx(int depth, int depth_cap) : depth_(depth) {
  if (depth < 1 || depth > depth_cap)
    throw std::invalid_argument("space depth out of range [1, " + std::to_string(depth_cap) +
                                "]: " + std::to_string(depth));
  atom_counts_.resize(static_cast<std::size_t>(depth) + 1);
  atom_counts_[0] = 1;
  for (int n = 1; n <= depth; ++n)
    atom_counts_[static_cast<std::size_t>(n)] = atom_counts_[static_cast<std::size_t>(n - 1)]
                                                << n;
}

SpacePtr make_space(int depth, int depth_cap) {
  return std::make_shared<const SpaceCtx>(depth, depth_cap);
}

CoordSet::CoordSet(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  std::sort(ranks_.begin(), ranks_.end());
  ranks_.erase(std::unique(ranks_.begin(), ranks_.end()), ranks_.end());
  if (!ranks_.empty() && ranks_.front() < 1) throw std::invalid_argument("coord ranks start at 1");
}

bool CoordSet::contains(int r) const {
  return std::binary_search(ranks_.begin(), ranks_.end(), r);
}

CoordSet CoordSet::intersect(const CoordSet& o) const {
  std::vector<int> out;
  std::set_intersection(ranks_.begin(), ranks_.end(), o.ranks_.begin(), o.ranks_.end(),
                        std::back_inserter(out));
  return CoordSet(std::move(out));
}

CoordSet CoordSet::unite(const CoordSet& o) const {
  std::vector<int> out;
  std::set_union(ranks_.begin(), ranks_.end(), o.ranks_.begin(), o.ranks_.end(),
                 std::back_inserter(out));
  return CoordSet(std::move(out));
}

std::string Point::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) os << ',';
    os << coords[i];
  }
  return os.str();
}

Point Point::parse(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) p.coords.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  return p;
}

std::string ClopenSet::to_string() const {
  return std::to_string(ctx->depth()) + ":" + bits.to_hex();
}

ClopenSet ClopenSet::parse(const SpacePtr& ctx, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("clopen set: missing depth prefix");
  const int d = std::stoi(text.substr(0, colon));
  if (d != ctx->depth()) throw std::invalid_argument("clopen set depth mismatch");
  return ClopenSet(ctx, Bitvec::from_hex(ctx->point_count(), text.substr(colon + 1)));
}

ClopenSet empty_set(const SpacePtr& ctx) { return ClopenSet(ctx, Bitvec(ctx->point_count())); }

ClopenSet full_set(const SpacePtr& ctx) {
  Bitvec b(ctx->point_count());
  b.set_all();
  return ClopenSet(ctx, std::move(b));
}

namespace detail {

void require_same_ctx(const ClopenSet& a, const ClopenSet& b) {
  if (a.ctx.get() != b.ctx.get() && a.ctx->depth() != b.ctx->depth())
    throw std::invalid_argument("clopen sets from different spaces");
}

void require_rank(const SpaceCtx& ctx, int rank) {
  if (rank < 0 || rank > ctx.depth())
    throw std::invalid_argument("rank out of range: " + std::to_string(rank));
}

}  // namespace detail

std::uint64_t point_to_index(const SpaceCtx& ctx, const Point& z) {
  if (static_cast<int>(z.coords.size()) != ctx.depth())
    throw std::invalid_argument("point arity mismatch");
  std::uint64_t idx = 0;
  for (int n = 1; n <= ctx.depth(); ++n) {
    const std::uint32_t zn = z.coords[static_cast<std::size_t>(n - 1)];
    if (zn < 1 || zn > ctx.radix(n))
      throw std::invalid_argument("coordinate out of range at rank " + std::to_string(n));
    idx += (zn - 1) * ctx.atom_count(n - 1);
  }
  return idx;
}

Point index_to_point(const SpaceCtx& ctx, std::uint64_t index) {
  Point z;
  z.coords.resize(static_cast<std::size_t>(ctx.depth()));
  for (int n = 1; n <= ctx.depth(); ++n) {
    z.coords[static_cast<std::size_t>(n - 1)] =
        static_cast<std::uint32_t>((index / ctx.atom_count(n - 1)) % ctx.radix(n)) + 1;
  }
  return z;
}

AtomId atom_of_point(const SpaceCtx& ctx, const Point& z, int rank) {
  detail::require_rank(ctx, rank);
  std::uint64_t idx = 0;
  for (int n = 1; n <= rank; ++n) idx += (z.coords[static_cast<std::size_t>(n - 1)] - 1) * ctx.atom_count(n - 1);
  return AtomId{rank, idx};
}

bool point_in(const ClopenSet& X, const Point& z) {
  return X.bits.test(point_to_index(*X.ctx, z));
}

ClopenSet atom_cylinder(const SpacePtr& ctx, const AtomId& A) {
  detail::require_rank(*ctx, A.rank);
  const std::uint64_t block = ctx->atom_count(A.rank);
  if (A.index >= block) throw std::invalid_argument("atom index out of range");
  Bitvec mask(block);
  mask.set(A.index);
  Bitvec out(ctx->point_count());
  kernels::broadcast_blocks(mask.data(), block, out.data(), out.size());
  return ClopenSet(ctx, std::move(out));
}

ClopenSet forbidden_section(const SpacePtr& ctx, int n, std::uint32_t tau) {
  if (n < 1 || n > ctx->depth()) throw std::invalid_argument("section rank out of range");
  if (tau < 1 || tau > ctx->radix(n))
    throw std::invalid_argument("section value out of range for rank " + std::to_string(n));
  Bitvec eq(ctx->point_count());
  kernels::fill_digit_eq(eq.data(), eq.size(), ctx->atom_count(n - 1), ctx->radix(n), tau - 1);
  Bitvec out(ctx->point_count());
  kernels::bit_not(eq.data(), out.data(), out.size());
  out.trim();
  return ClopenSet(ctx, std::move(out));
}

ClopenSet envelope(const ClopenSet& X, int m) {
  detail::require_rank(*X.ctx, m);
  const std::uint64_t block = X.ctx->atom_count(m);
  if (block == X.ctx->point_count()) return X;
  Bitvec meets(block);
  kernels::or_reduce_blocks(X.bits.data(), X.bits.size(), block, meets.data());
  Bitvec out(X.ctx->point_count());
  kernels::broadcast_blocks(meets.data(), block, out.data(), out.size());
  return ClopenSet(X.ctx, std::move(out));
}

bool depends_only_on(const ClopenSet& X, const CoordSet& J) {
  const SpaceCtx& ctx = *X.ctx;
  for (int n = 1; n <= ctx.depth(); ++n) {
    if (J.contains(n)) continue;
    if (!kernels::digit_invariant(X.bits.data(), X.bits.size(), ctx.atom_count(n - 1),
                                  ctx.radix(n)))
      return false;
  }
  return true;
}

bool measurable_at(const ClopenSet& X, int m) {
  const SpaceCtx& ctx = *X.ctx;
  for (int n = m + 1; n <= ctx.depth(); ++n)
    if (!kernels::digit_invariant(X.bits.data(), X.bits.size(), ctx.atom_count(n - 1),
                                  ctx.radix(n)))
      return false;
  return true;
}

int measurability_rank(const ClopenSet& X) {
  const SpaceCtx& ctx = *X.ctx;
  int m = ctx.depth();
  while (m > 0 && kernels::digit_invariant(X.bits.data(), X.bits.size(), ctx.atom_count(m - 1),
                                           ctx.radix(m)))
    --m;
  return m;
}

Point atom_translate(const SpaceCtx& ctx, const AtomId& A, const Point& z) {
  detail::require_rank(ctx, A.rank);
  Point y = z;
  std::uint64_t rest = A.index;
  for (int n = 1; n <= A.rank; ++n) {
    y.coords[static_cast<std::size_t>(n - 1)] =
        static_cast<std::uint32_t>(rest % ctx.radix(n)) + 1;
    rest /= ctx.radix(n);
  }
  return y;
}

ClopenSet translate_preimage(const AtomId& A, const ClopenSet& C) {
  const SpaceCtx& ctx = *C.ctx;
  detail::require_rank(ctx, A.rank);
  const std::uint64_t block = ctx.atom_count(A.rank);
  const std::uint64_t nblocks = ctx.point_count() / block;
  Bitvec col(nblocks);
  kernels::gather_stride(C.bits.data(), nblocks, block, A.index, col.data());
  Bitvec out(ctx.point_count());
  kernels::stretch_bits(col.data(), nblocks, block, out.data());
  return ClopenSet(C.ctx, std::move(out));
}

ClopenSet max_hole(const AtomId& A, const ClopenSet& X, int n) {
  const SpaceCtx& ctx = *X.ctx;
  if (!(A.rank < n && n <= ctx.depth()))
    throw std::invalid_argument("max_hole needs rank(A) < n <= depth");
  ClopenSet cyl = atom_cylinder(X.ctx, A);
  ClopenSet inside(X.ctx, cyl.bits & X.bits);
  ClopenSet env = envelope(inside, n);
  return ClopenSet(X.ctx, cyl.bits - env.bits);
}

}  // namespace covlab
