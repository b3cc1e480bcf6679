#include "covlab/levels.hpp"

#include <algorithm>
#include <sstream>

namespace covlab {

std::pair<std::int64_t, std::int64_t> LevelParams::alpha_of(int k) const {
  auto it = alpha.find(k);
  if (it == alpha.end()) throw std::invalid_argument("alpha undefined for level " + std::to_string(k));
  return it->second;
}

std::uint64_t LevelParams::n_of(int k) const {
  auto it = N.find(k);
  if (it == N.end()) throw std::invalid_argument("N undefined for level " + std::to_string(k));
  return it->second;
}

DyadicWeight LevelParams::item_weight(int k, std::size_t c) const {
  const auto [an, ad] = alpha_of(k);
  return pow_weight(weight_scale, k, n_of(k), c, an, ad);
}

LevelParams paper_alpha_profile(std::vector<int> k_range) {
  LevelParams p;
  p.k_range = std::move(k_range);
  p.mode = LevelParams::Mode::kPaper;
  for (int k : p.k_range) {
    const std::int64_t d = static_cast<std::int64_t>(k + 5);
    p.alpha[k] = {1, d * d * d};
  }
  return p;
}

LevelParamFlags validate_level_params(const LevelParams& p) {
  LevelParamFlags flags;
  for (int k : p.k_range) {
    const auto [an, ad] = p.alpha_of(k);
    // N(k) >= 2^(k+6) * 2^((k+5) * ad/an): compare exactly via N^an >= 2^E.
    const BigInt lhs = boost::multiprecision::pow(BigInt(p.n_of(k)), static_cast<unsigned>(an));
    const std::int64_t e = (k + 6) * an + (k + 5) * ad;
    bool ok = false;
    if (e <= 0)
      ok = true;
    else if (e < (1 << 22))
      ok = lhs >= (BigInt(1) << static_cast<unsigned>(e));
    flags.n_growth_ok[k] = ok;
  }
  flags.b_matches =
      p.q >= 0 && 2 * p.q + 10 < 63 && p.b == (std::uint64_t{1} << (2 * p.q + 10));
  return flags;
}

namespace {

ClopenSet sections_to_set(const SpacePtr& ctx, const std::map<int, std::uint32_t>& sections) {
  ClopenSet X = full_set(ctx);
  for (const auto& [n, tau] : sections) X.bits &= forbidden_section(ctx, n, tau).bits;
  return X;
}

}  // namespace

WeightedClass make_section_class(const SpacePtr& ctx, const LevelParams& p, int k,
                                 std::size_t size_cap) {
  const int d = ctx->depth();
  const std::uint64_t nk = p.n_of(k);

  // Count before generating.
  std::uint64_t count = 0;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    if (static_cast<std::uint64_t>(__builtin_popcount(mask)) > nk) continue;
    std::uint64_t combos = 1;
    for (int n = 1; n <= d; ++n)
      if (mask & (1u << (n - 1))) combos *= ctx->radix(n);
    count += combos;
    if (count > size_cap)
      throw std::invalid_argument("section class exceeds the size cap at level " +
                                  std::to_string(k));
  }

  WeightedClass C;
  C.ctx = ctx;
  C.label = "level-" + std::to_string(k);
  C.items.reserve(count);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> ranks;
    for (int n = 1; n <= d; ++n)
      if (mask & (1u << (n - 1))) ranks.push_back(n);
    if (ranks.size() > nk) continue;
    const DyadicWeight w = p.item_weight(k, ranks.size());
    // Mixed-radix enumeration of the forbidden values.
    std::vector<std::uint32_t> tau(ranks.size(), 1);
    while (true) {
      MarkedWeightedSet it;
      it.I = CoordSet(ranks);
      it.w = w;
      it.origin = MarkedWeightedSet::Origin::kSection;
      it.level = k;
      for (std::size_t i = 0; i < ranks.size(); ++i) it.sections[ranks[i]] = tau[i];
      it.X = sections_to_set(ctx, it.sections);
      C.items.push_back(std::move(it));
      std::size_t pos = 0;
      while (pos < ranks.size()) {
        if (++tau[pos] <= ctx->radix(ranks[pos])) break;
        tau[pos] = 1;
        ++pos;
      }
      if (pos == ranks.size()) break;
    }
  }
  return C;
}

WeightedClass make_base_class(const SpacePtr& ctx, const LevelParams& p, std::size_t size_cap) {
  WeightedClass all;
  all.ctx = ctx;
  all.label = "base";
  for (int k : p.k_range) {
    WeightedClass ck = make_section_class(ctx, p, k, size_cap);
    for (auto& it : ck.items) all.items.push_back(std::move(it));
    if (all.items.size() > size_cap)
      throw std::invalid_argument("base class exceeds the size cap");
  }
  WeightedClass pruned = dominance_prune(all);
  pruned.label = "base";
  return pruned;
}

MarkedWeightedSet project_item(const SpacePtr& ctx, const MarkedWeightedSet& item,
                               const CoordSet& J, const LevelParams& p) {
  if (item.origin != MarkedWeightedSet::Origin::kSection || item.sections.empty() ||
      item.level < 0)
    throw std::invalid_argument("projection needs a section item with its value assignment");
  const CoordSet I2 = item.I.intersect(J);
  if (I2.empty())
    throw std::invalid_argument("projection onto disjoint ranks: I and J do not meet");
  MarkedWeightedSet out;
  out.I = I2;
  out.origin = MarkedWeightedSet::Origin::kSection;
  out.level = item.level;
  for (int n : I2.ranks()) out.sections[n] = item.sections.at(n);
  out.X = sections_to_set(ctx, out.sections);
  // w' = w * (card I / card I')^alpha, applied to the stored weight so
  // that integer ratios stay exact (ratio 2 doubles the weight bit for bit).
  const auto [an, ad] = p.alpha_of(item.level);
  out.w = pow_weight(item.w.to_rational(), 0, item.I.size(), I2.size(), an, ad);
  return out;
}

Transversal transversal_certificate(const SpacePtr& ctx, const WeightedClass& F,
                                    const DyadicWeight& weight_budget) {
  Transversal out;
  if (!(F.total_weight() < weight_budget)) {
    out.refusal = "family weight is not below the certificate budget";
    return out;
  }
  for (const auto& it : F.items)
    if (it.origin != MarkedWeightedSet::Origin::kSection || it.sections.empty())
      throw std::invalid_argument("transversal needs section items with value assignments");

  std::vector<std::size_t> order(F.items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return F.items[a].level < F.items[b].level;
  });

  Point z;
  z.coords.assign(static_cast<std::size_t>(ctx->depth()), 1);
  std::vector<bool> used(static_cast<std::size_t>(ctx->depth()) + 1, false);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& it = F.items[order[r]];
    int pick = 0;
    for (int n : it.I.ranks())
      if (!used[static_cast<std::size_t>(n)]) {
        pick = n;
        break;
      }
    if (pick == 0) {
      out.refusal = "no distinct representative left at step " + std::to_string(r) +
                    " (item " + std::to_string(order[r]) + ")";
      return out;
    }
    used[static_cast<std::size_t>(pick)] = true;
    z.coords[static_cast<std::size_t>(pick - 1)] = it.sections.at(pick);
    out.picks.emplace_back(order[r], pick);
  }
  for (const auto& it : F.items)
    if (point_in(it.X, z))
      throw CertificateError("transversal point landed inside a family set");
  out.success = true;
  out.point = std::move(z);
  return out;
}

BigRational pathology_average(int N) {
  BigRational prod(1);
  for (int n = 1; n <= N; ++n)
    prod *= BigRational((BigInt(1) << n) - 1, BigInt(1) << n);
  return prod;
}

BigRational pathology_average_limit_lower(int N0) {
  return pathology_average(N0) * BigRational((BigInt(1) << N0) - 1, BigInt(1) << N0);
}

namespace {

// Elements of I inside the half-open interval (lo, hi].
std::size_t overlap_count(const CoordSet& I, int lo, int hi) {
  std::size_t c = 0;
  for (int r : I.ranks())
    if (lo < r && r <= hi) ++c;
  return c;
}

std::vector<std::vector<int>> allowed_choices(const std::vector<CoordSet>& chains,
                                              const CoordSet& forbidden, int t) {
  std::vector<std::vector<int>> U(chains.size());
  for (std::size_t l = 0; l < chains.size(); ++l) {
    const auto& ranks = chains[l].ranks();
    for (int u = 1; u <= t - 1; ++u) {
      if (overlap_count(forbidden, ranks[static_cast<std::size_t>(u - 1)],
                        ranks[static_cast<std::size_t>(u)]) == 0)
        U[l].push_back(u);
    }
    if (U[l].empty())
      throw CertificateError("no admissible interval in chain " + std::to_string(l) +
                             ": the forbidden ranks meet every candidate window");
  }
  return U;
}

}  // namespace

BigRational average_window_overlap(const CoordSet& I, const std::vector<CoordSet>& chains,
                                   const CoordSet& forbidden) {
  if (chains.empty()) return BigRational(0);
  const int t = static_cast<int>(chains.front().size());
  const auto U = allowed_choices(chains, forbidden, t);
  BigRational total(0);
  for (std::size_t l = 0; l < chains.size(); ++l) {
    const auto& ranks = chains[l].ranks();
    BigInt sum = 0;
    for (int u : U[l])
      sum += overlap_count(I, ranks[static_cast<std::size_t>(u - 1)],
                           ranks[static_cast<std::size_t>(u)]);
    total += BigRational(sum, BigInt(U[l].size()));
  }
  return total;
}

WindowSelection select_windows(const std::vector<CoordSet>& chains, const WeightedClass& F2,
                               const CoordSet& forbidden,
                               const BigRational& per_window_fraction) {
  WindowSelection sel;
  const std::size_t s = chains.size();
  if (s == 0) {
    // No windows: nothing is half-concentrated unless I is empty.
    for (std::size_t i = 0; i < F2.items.size(); ++i) {
      if (F2.items[i].I.empty()) {
        sel.f3.push_back(i);
        sel.covered_weight += F2.items[i].w;
      } else {
        sel.f4.push_back(i);
      }
    }
    sel.selection_bound = BigRational(0);
    return sel;
  }

  const int t = static_cast<int>(chains.front().size());
  for (const auto& c : chains)
    if (static_cast<int>(c.size()) != t || t < 2)
      throw std::invalid_argument("chains must share one block size t >= 2");
  const auto U = allowed_choices(chains, forbidden, t);

  std::size_t min_u = U[0].size();
  std::uint64_t combos = 1;
  for (const auto& u : U) {
    min_u = std::min(min_u, u.size());
    combos *= u.size();
    if (combos > (std::uint64_t{1} << 22))
      throw std::invalid_argument("window choice space too large to enumerate");
  }
  sel.min_choices = min_u;

  // Precompute per item, chain, and candidate u the window overlap.
  const std::size_t nitems = F2.items.size();
  std::vector<std::vector<std::vector<std::size_t>>> ov(
      nitems, std::vector<std::vector<std::size_t>>(s));
  for (std::size_t i = 0; i < nitems; ++i)
    for (std::size_t l = 0; l < s; ++l) {
      const auto& ranks = chains[l].ranks();
      ov[i][l].resize(U[l].size());
      for (std::size_t c = 0; c < U[l].size(); ++c) {
        const int u = U[l][c];
        ov[i][l][c] = overlap_count(F2.items[i].I, ranks[static_cast<std::size_t>(u - 1)],
                                    ranks[static_cast<std::size_t>(u)]);
      }
    }

  // Odometer over the allowed choices in lexicographic order; the first
  // strict minimum wins, so ties resolve to the smallest vector.
  std::vector<std::size_t> cursor(s, 0);
  std::vector<std::size_t> best_cursor;
  std::optional<DyadicWeight> best;
  while (true) {
    DyadicWeight score;
    for (std::size_t i = 0; i < nitems; ++i) {
      std::size_t inside = 0;
      for (std::size_t l = 0; l < s; ++l) inside += ov[i][l][cursor[l]];
      if (2 * inside >= F2.items[i].I.size() && !F2.items[i].I.empty())
        score += F2.items[i].w;
      else if (F2.items[i].I.empty())
        score += F2.items[i].w;
    }
    if (!best.has_value() || score < *best) {
      best = score;
      best_cursor = cursor;
    }
    bool wrapped = true;
    for (std::size_t i = s; i-- > 0;) {
      if (++cursor[i] < U[i].size()) {
        wrapped = false;
        break;
      }
      cursor[i] = 0;
    }
    if (wrapped) break;
  }

  sel.covered_weight = *best;
  sel.u.resize(s);
  std::vector<int> wranks;
  for (std::size_t l = 0; l < s; ++l) {
    const int u = U[l][best_cursor[l]];
    sel.u[l] = u;
    const auto& ranks = chains[l].ranks();
    const int lo = ranks[static_cast<std::size_t>(u - 1)];
    const int hi = ranks[static_cast<std::size_t>(u)];
    sel.windows.emplace_back(lo, hi);
    for (int r = lo + 1; r <= hi; ++r) wranks.push_back(r);
  }
  sel.window_ranks = CoordSet(wranks);
  sel.selection_bound = BigRational(2) * F2.total_weight().to_rational() / BigRational(min_u);

  sel.f3_per_window.resize(s);
  for (std::size_t i = 0; i < nitems; ++i) {
    const auto& I = F2.items[i].I;
    std::size_t inside = 0;
    std::vector<std::size_t> per(s);
    for (std::size_t l = 0; l < s; ++l) {
      per[l] = overlap_count(I, sel.windows[l].first, sel.windows[l].second);
      inside += per[l];
    }
    const bool in_f3 = I.empty() || 2 * inside >= I.size();
    if (in_f3) {
      sel.f3.push_back(i);
      for (std::size_t l = 0; l < s; ++l) {
        // card(I cap W_l) >= fraction * card I, exact rational compare
        const BigRational lhs(per[l]);
        if (lhs >= per_window_fraction * BigRational(I.size()))
          sel.f3_per_window[l].push_back(i);
      }
    } else {
      sel.f4.push_back(i);
    }
  }
  return sel;
}

WindowSplitResult window_split_cover(const std::vector<ClopenSet>& E,
                                     const std::vector<WeightedClass>& covers, int m,
                                     const DyadicWeight& alpha, const DyadicWeight& threshold,
                                     const LevelParams& params, const MuOracle* verify_mu) {
  if (E.size() != covers.size())
    throw std::invalid_argument("one cover per sequence prefix is required");
  WindowSplitResult out;
  if (E.empty()) {
    out.r0 = m;
    return out;
  }
  const SpacePtr ctx = E.front().ctx;
  const int d = ctx->depth();
  std::vector<int> above;
  for (int r = m + 1; r <= d; ++r) above.push_back(r);
  const CoordSet above_m(above);
  ClopenSet acc = empty_set(ctx);
  for (std::size_t n = 0; n < E.size(); ++n) {
    if (!depends_only_on(E[n], above_m))
      throw std::invalid_argument("sequence member depends on ranks <= m");
    acc.bits |= E[n].bits;
    if (!acc.bits.subset_of(covers[n].union_of().bits))
      throw std::invalid_argument("cover " + std::to_string(n) +
                                  " misses part of the prefix union");
    if (!(covers[n].total_weight() < threshold))
      throw std::invalid_argument("cover weight not below the window-split threshold");
  }

  // Tier assignment: first rank where the window share reaches half.
  auto tier_of = [&](const CoordSet& I) -> std::optional<int> {
    for (int r = m + 1; r <= d; ++r)
      if (2 * overlap_count(I, m, r) >= I.size()) return r;
    return std::nullopt;
  };
  auto signature = [&](const WeightedClass& F) {
    std::map<int, std::vector<std::string>> sig;
    for (const auto& it : F.items) {
      auto r = tier_of(it.I);
      if (!r.has_value()) continue;
      std::ostringstream os;
      os << it.X.bits.to_hex() << "|" << it.w.to_decimal();
      sig[*r].push_back(os.str());
    }
    for (auto& [r, v] : sig) std::sort(v.begin(), v.end());
    return sig;
  };

  // Exact repetition detection: the final tier tuple, with the first index
  // from which every later cover already agrees with it.
  const auto final_sig = signature(covers.back());
  std::size_t stable_from = covers.size() - 1;
  while (stable_from > 0 && signature(covers[stable_from - 1]) == final_sig) --stable_from;
  out.stable_from = stable_from;

  // Project the final cover tier by tier into its window.
  for (const auto& it : covers.back().items) {
    auto r = tier_of(it.I);
    if (!r.has_value()) continue;  // mass below m: never needed for the E_i
    std::vector<int> win;
    for (int x = m + 1; x <= *r; ++x) win.push_back(x);
    MarkedWeightedSet proj = project_item(ctx, it, CoordSet(win), params);
    auto& tier = out.tiers[*r];
    if (tier.items.empty()) {
      tier.ctx = ctx;
      tier.label = "tier-" + std::to_string(*r);
    }
    out.tier_weights[*r] += proj.w;
    tier.items.push_back(std::move(proj));
  }

  // Cut rank: smallest r0 whose tail weighs at most alpha.
  int r0 = d;
  for (int rc = m; rc <= d; ++rc) {
    DyadicWeight tail;
    for (const auto& [r, w] : out.tier_weights)
      if (r > rc) tail += w;
    if (tail <= alpha) {
      r0 = rc;
      break;
    }
  }
  out.r0 = r0;

  out.C = empty_set(ctx);
  for (const auto& [r, tier] : out.tiers) {
    if (r > r0) continue;
    for (const auto& it : tier.items) out.C.bits |= it.X.bits;
    out.c_weight_bound += out.tier_weights.at(r);
  }
  if (!depends_only_on(out.C, above_m))
    throw CertificateError("window-split cover depends on ranks <= m");

  // Tier inclusion: each E_i must sit inside its measurable prefix of
  // tiers; this is exactly what the threshold  gap guarantees.
  for (std::size_t i = 0; i < E.size(); ++i) {
    const int j = std::max(measurability_rank(E[i]), r0);
    ClopenSet tiered = empty_set(ctx);
    DyadicWeight tail_bound;
    for (const auto& [r, tier] : out.tiers) {
      if (r > j) continue;
      for (const auto& it : tier.items) tiered.bits |= it.X.bits;
      if (r > r0) tail_bound += out.tier_weights.at(r);
    }
    if (!E[i].bits.subset_of(tiered.bits))
      throw CertificateError(
          "tier inclusion failed for member " + std::to_string(i) +
          ": the oracle value of the full space is too close to the cover threshold");
    WindowSplitResult::Residual res;
    res.i = i;
    res.bound = tail_bound;
    if (verify_mu != nullptr) {
      res.evaluated = true;
      const ExtWeight v = verify_mu->eval(ClopenSet(ctx, E[i].bits - out.C.bits)).value();
      res.verified = !v.infinite && v.value <= res.bound && res.bound <= alpha;
    }
    out.residuals.push_back(std::move(res));
  }
  return out;
}

HoleExtractResult hole_extract(const ClopenSet& B, int m, const std::vector<ClopenSet>& E,
                               const MuOracle& mu, const DyadicWeight& alpha,
                               const CertThresholds& thr, const LevelParams& params,
                               bool verify) {
  const SpacePtr ctx = B.ctx;
  const int d = ctx->depth();
  if (m < 1 || m >= d) throw std::invalid_argument("hole extraction needs 1 <= m < depth");
  if (!measurable_at(B, m))
    throw std::invalid_argument("hole extraction target must be rank-m measurable");
  for (std::size_t i = 0; i < E.size(); ++i)
    for (std::size_t j = i + 1; j < E.size(); ++j)
      if (!E[i].bits.disjoint_with(E[j].bits))
        throw std::invalid_argument("hole extraction needs pairwise disjoint sets");

  HoleExtractResult out;
  // Per-atom residual target: alpha split over the rank-m atoms (a power
  // of two, so the dyadic shift is exact).
  const int shift = m * (m + 1) / 2;
  const DyadicWeight alpha_atom = alpha.div_pow2_floor(shift);

  out.carved = empty_set(ctx);
  std::size_t max_p = 0;
  std::vector<std::vector<DyadicWeight>> case2_bounds;
  for (std::uint64_t a = 0; a < ctx->atom_count(m); ++a) {
    const AtomId A{m, a};
    const ClopenSet cyl = atom_cylinder(ctx, A);
    if (!cyl.bits.subset_of(B.bits)) continue;

    HoleExtractResult::AtomOutcome oc;
    oc.atom = A;

    ClopenSet acc = empty_set(ctx);
    std::optional<std::size_t> case1_p;
    std::vector<ClopenSet> preimages;  // of the prefix unions
    for (std::size_t p = 0; p < E.size(); ++p) {
      acc.bits |= E[p].bits;
      preimages.push_back(translate_preimage(A, acc));
      if (mu.at_least(preimages.back(), thr.hole)) {
        case1_p = p;
        break;
      }
    }

    if (case1_p.has_value()) {
      oc.case_id = 1;
      oc.case1_p = *case1_p + 1;  // count of sets removed
      max_p = std::max(max_p, oc.case1_p);
      out.carved.bits |= cyl.bits - acc.bits;
    } else {
      oc.case_id = 2;
      oc.residual_alpha = alpha_atom;
      std::vector<ClopenSet> pulled;
      std::vector<WeightedClass> covers;
      for (std::size_t i = 0; i < E.size(); ++i)
        pulled.push_back(translate_preimage(A, E[i]));
      for (std::size_t n = 0; n < E.size(); ++n) {
        CoverResult r = mu.eval(preimages[n]);
        if (!r.coverable || !r.optimal)
          throw OracleError("hole extraction needs optimal witness covers");
        if (!mu.witness) throw OracleError("oracle provides no witness families");
        covers.push_back(mu.witness(preimages[n], r));
      }
      WindowSplitResult ws = window_split_cover(pulled, covers, m, alpha_atom, thr.hole,
                                                params, verify ? &mu : nullptr);
      ClopenSet c_in_atom(ctx, E.empty() ? Bitvec(ctx->point_count()) : ws.C.bits & cyl.bits);
      out.carved.bits |= c_in_atom.bits;
      std::vector<DyadicWeight> bounds;
      for (const auto& res : ws.residuals) bounds.push_back(res.bound);
      case2_bounds.push_back(std::move(bounds));
    }
    out.atoms.push_back(std::move(oc));
  }

  out.n = std::max(m + 1, measurability_rank(out.carved));
  out.tail_start = max_p;
  out.tail_bounds.assign(E.size(), DyadicWeight());
  for (std::size_t i = 0; i < E.size(); ++i)
    for (const auto& bounds : case2_bounds)
      if (i < bounds.size()) out.tail_bounds[i] += bounds[i];

  if (verify) {
    out.thin_checked = true;
    out.thin_ok = is_mn_thin_under(out.carved, m, out.n, mu, thr.thin);
  }
  return out;
}

ChainReport exhaustivity_chain(const std::vector<ClopenSet>& E, const MuOracle& mu,
                               std::uint64_t b, const DyadicWeight& alpha,
                               const CertThresholds& thr, const LevelParams& params,
                               bool verify) {
  if (E.empty()) throw std::invalid_argument("exhaustivity chain needs a nonempty sequence");
  const SpacePtr ctx = E.front().ctx;
  const int d = ctx->depth();

  ChainReport rep;
  std::vector<int> ranks{1};
  ClopenSet cur = full_set(ctx);
  int m = 1;
  rep.tail_bounds.assign(E.size(), DyadicWeight());

  while (ranks.size() < b && m < d) {
    HoleExtractResult he = hole_extract(cur, m, E, mu, alpha, thr, params, verify);
    ChainStep step;
    step.n = he.n;
    step.B = he.carved;
    step.thin_ok = he.thin_ok;
    // Claimed per-member bound for this step: certified for the tail,
    // directly evaluated ahead of it.
    for (std::size_t i = 0; i < E.size(); ++i) {
      DyadicWeight bound = he.tail_bounds[i];
      if (i < he.tail_start) {
        const ExtWeight v =
            mu.eval(ClopenSet(ctx, (E[i].bits & cur.bits) - he.carved.bits)).value();
        if (v.infinite) throw OracleError("residual has no finite oracle value");
        bound = v.value;
      }
      step.step_bounds.push_back(bound);
      rep.tail_bounds[i] += bound;
    }
    ranks.push_back(he.n);
    cur = he.carved;
    m = he.n;
    rep.steps.push_back(std::move(step));
  }
  rep.ranks = CoordSet(ranks);
  rep.rank_exhausted = rep.ranks.size() < b;

  if (rep.ranks.size() >= b) {
    bool thin = true;
    if (verify) thin = is_thin_over_under(cur, rep.ranks, mu, thr.thin);
    rep.qualifies = thin;
    if (thin) {
      MarkedWeightedSet item;
      item.X = cur;
      item.I = rep.ranks;
      item.w = pow_weight(params.weight_scale, params.q, 1, 1, 0, 1);
      item.origin = MarkedWeightedSet::Origin::kThin;
      item.level = params.q;
      rep.thin_item = std::move(item);
    }
  }
  return rep;
}

}  // namespace covlab
