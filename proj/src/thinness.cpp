#include "covlab/thinness.hpp"

#include <algorithm>
#include <optional>

namespace covlab {

namespace {

// Meets mask at rank n: bit p says whether rank-n atom p intersects X.
Bitvec meets_mask(const ClopenSet& X, int n) {
  const std::uint64_t block = X.ctx->atom_count(n);
  Bitvec out(block);
  kernels::or_reduce_blocks(X.bits.data(), X.bits.size(), block, out.data());
  return out;
}

}  // namespace

bool is_mn_thin(const ClopenSet& X, int m, int n) {
  const SpaceCtx& ctx = *X.ctx;
  if (!(1 <= m && m < n && n <= ctx.depth()))
    throw std::invalid_argument("thinness needs 1 <= m < n <= depth");
  // X is (m,n)-thin iff every rank-m atom has a rank-n extension missing X.
  Bitvec holes = ~meets_mask(X, n);
  Bitvec per_prefix(ctx.atom_count(m));
  kernels::or_reduce_blocks(holes.data(), holes.size(), ctx.atom_count(m), per_prefix.data());
  return per_prefix.all();
}

bool is_thin_over(const ClopenSet& X, const CoordSet& I) {
  const auto& rs = I.ranks();
  for (std::size_t i = 0; i + 1 < rs.size(); ++i)
    if (!is_mn_thin(X, rs[i], rs[i + 1])) return false;
  return true;
}

bool is_mn_thin_under(const ClopenSet& X, int m, int n, const MuOracle& mu,
                      const DyadicWeight& threshold) {
  const SpaceCtx& ctx = *X.ctx;
  if (!(1 <= m && m < n && n <= ctx.depth()))
    throw std::invalid_argument("thinness needs 1 <= m < n <= depth");
  for (std::uint64_t a = 0; a < ctx.atom_count(m); ++a) {
    const AtomId A{m, a};
    const ClopenSet hole = max_hole(A, X, n);
    if (!mu.at_least(translate_preimage(A, hole), threshold)) return false;
  }
  return true;
}

bool is_thin_over_under(const ClopenSet& X, const CoordSet& I, const MuOracle& mu,
                        const DyadicWeight& threshold) {
  const auto& rs = I.ranks();
  for (std::size_t i = 0; i + 1 < rs.size(); ++i)
    if (!is_mn_thin_under(X, rs[i], rs[i + 1], mu, threshold)) return false;
  return true;
}

ChainSelection chain_select(const std::vector<CoordSet>& families, int t) {
  const std::size_t s = families.size();
  if (t < 1) throw std::invalid_argument("block size t must be positive");
  ChainSelection sel;
  if (s == 0) return sel;

  std::size_t min_card = families[0].size();
  for (const auto& f : families) min_card = std::min(min_card, f.size());
  const bool disjoint_blocks = min_card >= s * static_cast<std::size_t>(t);
  if (!disjoint_blocks &&
      min_card < s * static_cast<std::size_t>(t - 1) + 1)
    throw std::invalid_argument("families too small: need at least s*(t-1)+1 elements each");

  // Position l takes the remaining family whose pivot element (the one that
  // will become max J_l) is smallest; pivots never decrease down the chain,
  // which is exactly the ordering property the blocks need.
  const std::size_t stride = disjoint_blocks ? static_cast<std::size_t>(t)
                                             : static_cast<std::size_t>(t - 1);
  std::vector<std::size_t> remaining(s);
  for (std::size_t i = 0; i < s; ++i) remaining[i] = i;

  for (std::size_t pos = 0; pos < s; ++pos) {
    const std::size_t pivot = pos * stride + static_cast<std::size_t>(t) - 1;  // 0-based
    std::size_t best = remaining.size();
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      const auto& ranks = families[remaining[c]].ranks();
      if (best == remaining.size() ||
          ranks[pivot] < families[remaining[best]].ranks()[pivot])
        best = c;
    }
    const std::size_t chosen = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    const auto& ranks = families[chosen].ranks();
    std::vector<int> block(ranks.begin() + static_cast<std::ptrdiff_t>(pos * stride),
                           ranks.begin() + static_cast<std::ptrdiff_t>(pos * stride) +
                               static_cast<std::ptrdiff_t>(t));
    sel.order.push_back(chosen);
    sel.blocks.emplace_back(std::move(block));
  }
  return sel;
}

namespace {

struct WalkCursor {
  const SpaceCtx& ctx;
  int rank = 0;
  std::uint64_t index = 0;
  bool forced = false;

  // Extends the current atom to `target` rank, forcing coordinate
  // force_rank to force_val when it falls inside the extension.
  void extend(int target, int force_rank, std::uint32_t force_val) {
    for (int r = rank + 1; r <= target; ++r) {
      std::uint64_t digit = 0;
      if (r == force_rank) {
        digit = force_val - 1;
        forced = true;
      }
      index += digit * ctx.atom_count(r - 1);
    }
    rank = target;
  }
};

}  // namespace

std::pair<Point, WalkTrace> avoidance_walk(const SpacePtr& ctx,
                                           const std::vector<WalkConstraint>& family, int n,
                                           std::uint32_t tau) {
  const int d = ctx->depth();
  if (n < 1 || n > d) throw std::invalid_argument("target rank out of range");
  if (tau < 1 || tau > ctx->radix(n)) throw std::invalid_argument("target value out of range");
  int prev_r = 0;
  for (const auto& c : family) {
    const auto [m, mid, r] = std::array{c.ranks[0], c.ranks[1], c.ranks[2]};
    if (!(1 <= m && m < mid && mid < r && r <= d))
      throw std::invalid_argument("walk constraint ranks must satisfy m < n < r <= depth");
    if (m < prev_r) throw std::invalid_argument("walk constraints must form a rank chain");
    prev_r = r;
  }

  WalkTrace trace;
  WalkCursor cur{*ctx};

  for (const auto& c : family) {
    const int m = c.ranks[0];
    const int nm = c.ranks[1];
    const int nr = c.ranks[2];

    // Reach rank m, forcing the target coordinate when it lies at or below.
    cur.extend(m, !cur.forced && n <= m ? n : 0, tau);

    int base_rank;
    int hole_rank;
    int chance;
    if (!cur.forced && m < n && n <= nm) {
      // Force inside a rank-nm atom, then use the (nm, nr) chance.
      cur.extend(nm, n, tau);
      base_rank = nm;
      hole_rank = nr;
      chance = 2;
    } else {
      base_rank = m;
      hole_rank = nm;
      chance = 1;
    }

    // Smallest rank-hole_rank atom inside the current atom missing X.
    const Bitvec meets = meets_mask(c.X, hole_rank);
    const std::uint64_t base_count = ctx->atom_count(base_rank);
    std::optional<std::uint64_t> found;
    for (std::uint64_t p = cur.index; p < ctx->atom_count(hole_rank); p += base_count) {
      if (!meets.test(p)) {
        found = p;
        break;
      }
    }
    if (!found.has_value())
      throw CertificateError("avoidance walk found no hole at rank " +
                             std::to_string(hole_rank) + "; the constraint set is not (" +
                             std::to_string(base_rank) + "," + std::to_string(hole_rank) +
                             ")-thin");
    trace.steps.push_back(
        {AtomId{base_rank, cur.index}, atom_cylinder(ctx, AtomId{hole_rank, *found}), chance});
    cur.rank = hole_rank;
    cur.index = *found;
  }

  if (!cur.forced) cur.extend(std::max(cur.rank, n), n, tau);
  cur.extend(d, 0, 0);
  Point z = index_to_point(*ctx, cur.index);
  for (const auto& c : family)
    if (point_in(c.X, z))
      throw CertificateError("avoidance walk produced a point inside a constraint set");
  trace.final_point = z;
  return {std::move(z), std::move(trace)};
}

StabilizeResult stabilize_envelopes(const std::vector<ClopenSet>& sets) {
  StabilizeResult out;
  if (sets.empty()) return out;
  const SpacePtr ctx = sets.front().ctx;
  const int d = ctx->depth();
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (!sets[i].bits.disjoint_with(sets[j].bits))
        throw std::invalid_argument("stabilize_envelopes needs pairwise disjoint sets");

  std::vector<std::size_t> cand(sets.size());
  for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = i;

  int prev_m = 0;
  while (!cand.empty()) {
    const std::size_t e = cand.front();
    const int m = std::max(prev_m + 1, measurability_rank(sets[e]));
    if (m > d) break;  // rank budget of the truncation exhausted
    out.chosen.push_back(e);
    out.ranks.push_back(m);
    prev_m = m;

    // Pigeonhole on the rank-m envelope: the first remaining candidate
    // fixes the envelope class, lowest index wins.
    std::vector<std::size_t> rest(cand.begin() + 1, cand.end());
    if (rest.empty()) break;
    const ClopenSet lead_env = envelope(sets[rest.front()], m);
    std::vector<std::size_t> kept;
    for (std::size_t k : rest)
      if (envelope(sets[k], m) == lead_env) kept.push_back(k);
    cand = std::move(kept);
  }

  // Claim of the stabilized construction: members two or more steps past a
  // rank pair are thin for that pair.
  for (std::size_t i = 0; i + 1 < out.ranks.size(); ++i)
    for (std::size_t k = i + 2; k < out.chosen.size(); ++k) {
      StabilizeResult::Claim c;
      c.member = k;
      c.m_lo = out.ranks[i];
      c.m_hi = out.ranks[i + 1];
      c.verified = is_mn_thin(sets[out.chosen[k]], c.m_lo, c.m_hi);
      out.claims.push_back(c);
    }
  return out;
}

}  // namespace covlab
