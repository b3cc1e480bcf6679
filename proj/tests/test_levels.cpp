#include "covlab/levels.hpp"

#include <algorithm>

#include "covlab/rng.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

LevelParams tiny_params(std::uint64_t n1 = 8) {
  LevelParams lp;
  lp.k_range = {1};
  lp.alpha[1] = {1, 2};
  lp.N[1] = n1;
  lp.q = 1;
  lp.b = 2;
  return lp;
}

ClopenSet random_set(Rng& rng, const SpacePtr& ctx, std::uint32_t density_pct = 50) {
  ClopenSet s = empty_set(ctx);
  for (std::size_t i = 0; i < s.bits.size(); ++i)
    if (rng.below(100) < density_pct) s.bits.set(i);
  return s;
}

}  // namespace

TEST_CASE("section class counts by enumeration") {
  auto ctx = make_space(3);
  // independent count: sum over nonempty I with |I| <= N of prod radix
  auto count_oracle = [&](std::uint64_t nk) {
    std::uint64_t total = 0;
    for (std::uint32_t mask = 1; mask < 8u; ++mask) {
      if (static_cast<std::uint64_t>(__builtin_popcount(mask)) > nk) continue;
      std::uint64_t c = 1;
      for (int n = 1; n <= 3; ++n)
        if (mask & (1u << (n - 1))) c *= (1u << n);
      total += c;
    }
    return total;
  };
  CHECK(count_oracle(1) == 14);
  CHECK(count_oracle(2) == 70);
  CHECK(make_section_class(ctx, tiny_params(1), 1).items.size() == 14);
  CHECK(make_section_class(ctx, tiny_params(2), 1).items.size() == 70);
  CHECK_THROWS_AS(make_section_class(ctx, tiny_params(2), 1, 10), std::invalid_argument);
}

TEST_CASE("section items: sets, marks, and weights") {
  auto ctx = make_space(3);
  LevelParams lp = tiny_params(3);
  WeightedClass c = make_section_class(ctx, lp, 1);
  for (const auto& it : c.items) {
    REQUIRE_FALSE(it.I.empty());
    CHECK(it.origin == MarkedWeightedSet::Origin::kSection);
    CHECK(it.level == 1);
    // X equals the intersection of its sections, bit for bit
    ClopenSet expect = full_set(ctx);
    for (const auto& [n, tau] : it.sections)
      expect.bits &= forbidden_section(ctx, n, tau).bits;
    CHECK(it.X == expect);
    CHECK(depends_only_on(it.X, it.I));
    // full-card items carry weight exactly 2^-k
    if (it.I.size() == lp.N[1]) CHECK(it.w == DyadicWeight::from_pow2(1, -1));
  }
  // weights are non-increasing in card I
  std::map<std::size_t, DyadicWeight> by_card;
  for (const auto& it : c.items) by_card.emplace(it.I.size(), it.w);
  for (auto it = by_card.begin(); std::next(it) != by_card.end(); ++it)
    CHECK(std::next(it)->second <= it->second);
}

TEST_CASE("validator flags") {
  LevelParams lp = tiny_params();
  auto flags = validate_level_params(lp);
  CHECK_FALSE(flags.n_growth_ok[1]);  // 8 is far below the growth condition
  CHECK_FALSE(flags.b_matches);       // b = 2 != 2^(2q+10)
  lp.b = std::uint64_t{1} << 12;
  CHECK(validate_level_params(lp).b_matches);
  // alpha = 1 and N(1) = 2^12 satisfies N >= 2^7 * 2^6
  LevelParams big;
  big.k_range = {1};
  big.alpha[1] = {1, 1};
  big.N[1] = std::uint64_t{1} << 13;
  big.q = 1;
  CHECK(validate_level_params(big).n_growth_ok[1]);
}

TEST_CASE("project_item follows the weight law") {
  auto ctx = make_space(4);
  LevelParams lp = tiny_params(8);

  // J containing I: nothing changes
  WeightedClass c = make_section_class(ctx, lp, 1);
  const auto& item = c.items[17];
  MarkedWeightedSet same = project_item(ctx, item, CoordSet({1, 2, 3, 4}), lp);
  CHECK(same.X == item.X);
  CHECK(same.I == item.I);
  CHECK(same.w == item.w);

  // card I = 4, card I cap J = 1, alpha = 1/2: the weight doubles
  MarkedWeightedSet full;
  full.origin = MarkedWeightedSet::Origin::kSection;
  full.level = 1;
  full.I = CoordSet({1, 2, 3, 4});
  for (int n = 1; n <= 4; ++n) full.sections[n] = 1;
  full.w = lp.item_weight(1, 4);
  MarkedWeightedSet proj = project_item(ctx, full, CoordSet({2}), lp);
  CHECK(proj.w == full.w * 2);
  CHECK(proj.I == CoordSet({2}));

  CHECK_THROWS_AS(project_item(ctx, full, CoordSet({5, 6}), lp), std::invalid_argument);
}

TEST_CASE("projection law on random items") {
  auto ctx = make_space(4);
  LevelParams lp = tiny_params(8);
  WeightedClass c = make_section_class(ctx, lp, 1);
  Rng rng(0xBEAD);
  const BigRational slack(1, BigInt(1) << 40);
  for (int trial = 0; trial < 500; ++trial) {
    const auto& it = c.items[rng.below(c.items.size())];
    std::vector<int> jr;
    for (int r = 1; r <= 4; ++r)
      if (rng.chance(1, 2)) jr.push_back(r);
    CoordSet J(jr);
    if (it.I.intersect(J).empty()) continue;
    MarkedWeightedSet p = project_item(ctx, it, J, lp);
    CHECK(it.X.bits.subset_of(p.X.bits));
    CHECK(depends_only_on(p.X, J));
    CHECK(p.I == it.I.intersect(J));
    // Eq-style weight law within the rounding slack:
    // w' ~ w * (card I / card I')^alpha with alpha = 1/2
    const BigRational lhs = p.w.to_rational();
    BigRational ratio(it.I.size(), p.I.size());
    // square both sides to stay rational: (w'/w)^2 == ratio within slack
    const BigRational got2 = (lhs / it.w.to_rational()) * (lhs / it.w.to_rational());
    const BigRational err = got2 > ratio ? got2 - ratio : ratio - got2;
    CHECK(err < BigRational(1, BigInt(1) << 30));
    // the 1/4-mass bound forces w' <= 2w (alpha <= 1/2)
    if (4 * p.I.size() >= it.I.size())
      CHECK(p.w.to_rational() <= BigRational(2) * it.w.to_rational() + slack);
  }
}

TEST_CASE("base class evaluation (psi)") {
  auto ctx = make_space(2);
  LevelParams lp;
  lp.k_range = {1};
  lp.alpha[1] = {1, 1};
  lp.N[1] = 1;
  ClassOracle psi(make_base_class(ctx, lp));

  CHECK(psi.eval(empty_set(ctx)).value().value == DyadicWeight());
  // B = S_{1,1} at d=2: the singleton section covering it is optimal
  CoverResult r = psi.eval(forbidden_section(ctx, 1, 1));
  REQUIRE(r.optimal);
  CHECK(r.value().value == lp.item_weight(1, 1));

  Rng rng(0x91C3);
  for (int i = 0; i < 15; ++i) {
    ClopenSet b = random_set(rng, ctx, 60);
    ClopenSet a = b;
    for (std::size_t j = 0; j < a.bits.size(); ++j)
      if (a.bits.test(j) && rng.chance(1, 2)) a.bits.set(j, false);
    CHECK(psi.eval(a).value() <= psi.eval(b).value());
  }
}

TEST_CASE("transversal certificate") {
  auto ctx = make_space(3);
  LevelParams lp = tiny_params(8);

  // single item: z_1 = 1 escapes S_{1,1} cap S_{2,2}
  MarkedWeightedSet it;
  it.origin = MarkedWeightedSet::Origin::kSection;
  it.level = 1;
  it.I = CoordSet({1, 2});
  it.sections = {{1, 1}, {2, 2}};
  it.X = ClopenSet(ctx, forbidden_section(ctx, 1, 1).bits & forbidden_section(ctx, 2, 2).bits);
  it.w = lp.item_weight(1, 2);
  WeightedClass F{ctx, "F", {it}};
  Transversal tr = transversal_certificate(ctx, F, DyadicWeight::from_int(100));
  REQUIRE(tr.success);
  CHECK_FALSE(point_in(it.X, tr.point));

  // empty family: any point works
  WeightedClass none{ctx, "F", {}};
  CHECK(transversal_certificate(ctx, none, DyadicWeight::from_int(1)).success);

  // over budget: refusal
  CHECK_FALSE(transversal_certificate(ctx, F, DyadicWeight()).success);
}

TEST_CASE("transversal succeeds whenever the cardinality cascade holds") {
  auto ctx = make_space(4);
  LevelParams lp = tiny_params(8);
  WeightedClass pool = make_section_class(ctx, lp, 1);
  Rng rng(0xF00D);
  int ran = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // sample items with card I_r >= r+1 after sorting (cascade)
    std::vector<MarkedWeightedSet> picked;
    const std::size_t want = 1 + rng.below(3);
    for (std::size_t r = 0; r < want; ++r) {
      std::vector<const MarkedWeightedSet*> fits;
      for (const auto& it : pool.items)
        if (it.I.size() >= r + 2) fits.push_back(&it);
      if (fits.empty()) break;
      picked.push_back(*fits[rng.below(fits.size())]);
    }
    if (picked.size() < want) continue;
    WeightedClass F{ctx, "F", picked};
    Transversal tr = transversal_certificate(ctx, F, DyadicWeight::from_int(1000));
    REQUIRE(tr.success);
    for (const auto& m : F.items) CHECK_FALSE(point_in(m.X, tr.point));
    ++ran;
  }
  CHECK(ran > 100);
}

TEST_CASE("pathology averages") {
  CHECK(pathology_average(1) == BigRational(1, 2));
  CHECK(pathology_average(2) == BigRational(3, 8));

  // brute force at d = N: average the membership indicator over all
  // section assignments, at several probe points
  for (int N = 1; N <= 5; ++N) {
    auto ctx = make_space(N);
    std::vector<std::uint64_t> probes{0, ctx->point_count() / 2, ctx->point_count() - 1};
    for (std::uint64_t pi : probes) {
      const Point z = index_to_point(*ctx, pi);
      std::uint64_t hit = 0, total = 0;
      std::vector<std::uint32_t> tau(static_cast<std::size_t>(N), 1);
      while (true) {
        bool inside = true;
        for (int n = 1; n <= N && inside; ++n)
          inside = z.coords[static_cast<std::size_t>(n - 1)] != tau[static_cast<std::size_t>(n - 1)];
        hit += inside;
        ++total;
        std::size_t pos = 0;
        while (pos < tau.size()) {
          if (++tau[pos] <= ctx->radix(static_cast<int>(pos) + 1)) break;
          tau[pos] = 1;
          ++pos;
        }
        if (pos == tau.size()) break;
      }
      CHECK(BigRational(hit, total) == pathology_average(N));
    }
  }

  // partial products are non-increasing and dominated by the tail bound
  const BigRational limit_lower = pathology_average_limit_lower(20);
  for (int N = 1; N <= 12; ++N) {
    CHECK(pathology_average(N + 1) < pathology_average(N));
    CHECK(pathology_average(N) > limit_lower);
  }
  CHECK(limit_lower > BigRational(0));
}

TEST_CASE("window selection: empty F2 and closed-form average") {
  auto ctx = make_space(4);
  WeightedClass empty{ctx, "F2", {}};
  std::vector<CoordSet> chains{CoordSet({1, 2, 3})};
  auto sel = select_windows(chains, empty, CoordSet{}, BigRational(1, 4));
  CHECK(sel.covered_weight == DyadicWeight());
  CHECK(sel.f3.empty());

  // closed-form average equals enumeration over all (t-1)^s choices
  Rng rng(0xACE);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = 1 + rng.below(3);
    const int t = 2 + static_cast<int>(rng.below(3));  // t <= 4
    // random strictly increasing chains over 1..30
    std::vector<CoordSet> cs;
    int base = 1;
    bool ok = true;
    for (std::size_t l = 0; l < s; ++l) {
      std::vector<int> ranks;
      for (int j = 0; j < t; ++j) {
        base += static_cast<int>(rng.below(3));
        ranks.push_back(base);
        base += 1;
      }
      if (ranks.back() > 30) ok = false;
      cs.push_back(CoordSet(ranks));
    }
    if (!ok) continue;
    std::vector<int> irs;
    for (int r = 1; r <= 30; ++r)
      if (rng.chance(1, 3)) irs.push_back(r);
    const CoordSet I(irs);

    const BigRational closed = average_window_overlap(I, cs, CoordSet{});
    // enumeration oracle
    BigInt total = 0;
    std::uint64_t combos = 0;
    std::vector<int> u(s, 1);
    while (true) {
      std::size_t inside = 0;
      for (std::size_t l = 0; l < s; ++l) {
        const auto& ranks = cs[l].ranks();
        for (int r : I.ranks())
          if (ranks[static_cast<std::size_t>(u[l] - 1)] < r &&
              r <= ranks[static_cast<std::size_t>(u[l])])
            ++inside;
      }
      total += inside;
      ++combos;
      std::size_t pos = 0;
      while (pos < s) {
        if (++u[pos] <= t - 1) break;
        u[pos] = 1;
        ++pos;
      }
      if (pos == s) break;
    }
    CHECK(closed == BigRational(total, combos));
    // the linearity bound: average <= card I / (t-1)
    CHECK(closed <= BigRational(I.size(), static_cast<std::uint64_t>(t - 1)));
  }
}

TEST_CASE("window selection: the chosen u beats the average bound") {
  auto ctx = make_space(4);
  LevelParams lp = tiny_params(8);
  WeightedClass pool = make_section_class(ctx, lp, 1);
  Rng rng(0x90D);
  for (int trial = 0; trial < 120; ++trial) {
    WeightedClass f2{ctx, "F2", {}};
    const std::size_t n = rng.below(8);
    for (std::size_t i = 0; i < n; ++i) f2.items.push_back(pool.items[rng.below(pool.items.size())]);

    const std::size_t s = 1 + rng.below(2);
    const int t = 2;
    std::vector<CoordSet> chains;
    if (s == 1) {
      chains.push_back(CoordSet({1 + static_cast<int>(rng.below(2)), 3 + static_cast<int>(rng.below(2))}));
    } else {
      chains.push_back(CoordSet({1, 2}));
      chains.push_back(CoordSet({3, 4}));
    }
    auto sel = select_windows(chains, f2, CoordSet{}, BigRational(1, 4));
    // S(u) <= 2 w(F2) / (t-1)
    CHECK(sel.covered_weight.to_rational() <=
          BigRational(2) * f2.total_weight().to_rational() / BigRational(t - 1));
    CHECK(sel.covered_weight.to_rational() <= sel.selection_bound);
    // the split is a partition and the per-window classes cover F3
    CHECK(sel.f3.size() + sel.f4.size() == f2.items.size());
    std::vector<bool> seen(f2.items.size(), false);
    for (auto& per : sel.f3_per_window)
      for (std::size_t i : per) seen[i] = true;
    for (std::size_t i : sel.f3) CHECK(seen[i]);
  }
}

TEST_CASE("window selection respects the forbidden rank set") {
  // chains over {1..6}, forbidden ranks knock out specific intervals
  std::vector<CoordSet> chains{CoordSet({1, 3, 5})};
  auto ctx = make_space(4);
  WeightedClass f2{ctx, "F2", {}};
  auto sel = select_windows(chains, f2, CoordSet({2}), BigRational(1, 4));
  // interval (1,3] contains 2, so only (3,5] is allowed
  REQUIRE(sel.u.size() == 1);
  CHECK(sel.u[0] == 2);
  CHECK(sel.windows[0] == std::pair<int, int>{3, 5});
  CHECK_THROWS_AS(select_windows(chains, f2, CoordSet({2, 4}), BigRational(1, 4)),
                  CertificateError);
}
