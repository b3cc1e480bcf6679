#include <algorithm>

#include "covlab/levels.hpp"
#include "covlab/rng.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

// d=3 profile with enough weight spread for the threshold chain:
// singles weigh 4, pairs 2, triples 4/3; the whole space evaluates to 8.
LevelParams spread_params() {
  LevelParams lp;
  lp.k_range = {1};
  lp.alpha[1] = {1, 1};
  lp.N[1] = 8;
  lp.q = 1;
  lp.b = 2;
  return lp;
}

ClopenSet cylinder23(const SpacePtr& ctx, std::uint32_t a, std::uint32_t b) {
  ClopenSet s = full_set(ctx);
  s.bits &= ~forbidden_section(ctx, 2, a).bits;  // z2 = a
  s.bits &= ~forbidden_section(ctx, 3, b).bits;  // z3 = b
  return s;
}

}  // namespace

TEST_CASE("the spread profile evaluates the whole space to 6") {
  auto ctx = make_space(3);
  LevelParams lp = spread_params();
  ClassOracle psi(make_base_class(ctx, lp), 4000000);
  CoverResult top = psi.eval(full_set(ctx));
  REQUIRE(top.optimal);
  // three pair sections with distinct values cross-cover the whole space
  CHECK(top.value().value == DyadicWeight::from_int(6));
  // a pair-cylinder costs one pair item
  CHECK(psi.eval(cylinder23(ctx, 1, 1)).value().value == DyadicWeight::from_int(2));
}

TEST_CASE("window_split_cover on a handcrafted instance") {
  auto ctx = make_space(3);
  LevelParams lp = spread_params();
  ClassOracle psi(make_base_class(ctx, lp), 1000000);
  MuOracle mu = psi.as_mu();
  const DyadicWeight theta = DyadicWeight::from_pow2(5, -1);  // 2.5

  // E_1 = {z2=1, z3=1} does not depend on rank 1
  ClopenSet e1 = cylinder23(ctx, 1, 1);
  // handcrafted cover: the pair S_{2,2} cap S_{3,2}, weight 2 < theta
  MarkedWeightedSet pair;
  pair.origin = MarkedWeightedSet::Origin::kSection;
  pair.level = 1;
  pair.I = CoordSet({2, 3});
  pair.sections = {{2, 2}, {3, 2}};
  pair.X = ClopenSet(ctx, forbidden_section(ctx, 2, 2).bits & forbidden_section(ctx, 3, 2).bits);
  pair.w = lp.item_weight(1, 2);
  REQUIRE(pair.w == DyadicWeight::from_int(2));
  REQUIRE(e1.bits.subset_of(pair.X.bits));
  WeightedClass cover{ctx, "F1", {pair}};

  auto ws = window_split_cover({e1}, {cover}, 1, DyadicWeight::from_int(1), theta, lp, &mu);
  CHECK(depends_only_on(ws.C, CoordSet({2, 3})));
  // both postconditions re-checked: the kept tier weights cap the value
  CHECK(ws.c_weight_bound <= theta * 2);
  CHECK_FALSE(psi.at_least(ws.C, ws.c_weight_bound + DyadicWeight::from_pow2(1, -4)));
  REQUIRE(ws.residuals.size() == 1);
  CHECK(ws.residuals[0].evaluated);
  CHECK(ws.residuals[0].verified);
  const ExtWeight res_val = psi.eval(ClopenSet(ctx, e1.bits - ws.C.bits)).value();
  CHECK(res_val.value <= DyadicWeight::from_int(1));

  // empty sequence: empty cover
  auto empty = window_split_cover({}, {}, 1, DyadicWeight::from_int(1), theta, lp, nullptr);
  CHECK(empty.residuals.empty());
  CHECK(empty.tiers.empty());
}

TEST_CASE("hole_extract case analysis") {
  auto ctx = make_space(3);
  LevelParams lp = spread_params();
  ClassOracle psi(make_base_class(ctx, lp), 1000000);
  MuOracle mu = psi.as_mu();
  const CertThresholds thr{DyadicWeight::from_pow2(5, -1), DyadicWeight::from_int(1)};
  const DyadicWeight alpha = DyadicWeight::from_int(1);

  SUBCASE("sets missing B entirely degenerate to case 2 with zero residual") {
    ClopenSet B = atom_cylinder(ctx, AtomId{1, 0});
    ClopenSet e = empty_set(ctx);
    e.bits.set(point_to_index(*ctx, Point{{2, 1, 1}}));  // inside the other atom
    auto he = hole_extract(B, 1, {e}, mu, alpha, thr, lp, true);
    REQUIRE(he.atoms.size() == 1);
    CHECK(he.atoms[0].case_id == 2);
    CHECK(he.thin_ok);
    CHECK(he.tail_bounds[0] == DyadicWeight());
    CHECK((B.bits & e.bits).none());
  }

  SUBCASE("a heavy union triggers case 1 and zeroes the tail") {
    // E_1 = {z2=1}: its preimage in either rank-1 atom costs 4 >= theta
    ClopenSet e1(ctx, (~forbidden_section(ctx, 2, 1).bits));
    ClopenSet e2 = empty_set(ctx);
    e2.bits.set(point_to_index(*ctx, Point{{1, 2, 1}}));
    auto he = hole_extract(full_set(ctx), 1, {e1, e2}, mu, alpha, thr, lp, true);
    for (const auto& a : he.atoms) {
      CHECK(a.case_id == 1);
      CHECK(a.case1_p == 1);  // the first prefix already clears the bar
    }
    CHECK(he.thin_ok);
    CHECK(he.tail_start == 1);
    // case 1 removed E_1 from every atom, so B' misses E_1
    CHECK(he.carved.bits.disjoint_with(e1.bits));
    // the later set's residual is certificate-bounded
    const ExtWeight r2 = psi.eval(ClopenSet(ctx, e2.bits - he.carved.bits)).value();
    CHECK(r2.value <= he.tail_bounds[1] + alpha);
  }

  SUBCASE("mixed per-atom cases verify their postconditions") {
    // atom (1): heavy slice; atom (2): small pair-cylinder
    ClopenSet a0 = atom_cylinder(ctx, AtomId{1, 0});
    ClopenSet a1 = atom_cylinder(ctx, AtomId{1, 1});
    ClopenSet e1(ctx, a0.bits & ~forbidden_section(ctx, 2, 1).bits);
    ClopenSet e2(ctx, a1.bits & cylinder23(ctx, 2, 2).bits);
    auto he = hole_extract(full_set(ctx), 1, {e1, e2}, mu, alpha, thr, lp, true);
    REQUIRE(he.atoms.size() == 2);
    CHECK(he.atoms[0].case_id == 1);
    CHECK(he.atoms[1].case_id == 2);
    CHECK(he.thin_ok);
    CHECK(he.n > 1);
    // every residual re-checks against its bound plus the step target
    for (std::size_t i = 0; i < 2; ++i) {
      const ClopenSet diff(ctx, (i == 0 ? e1 : e2).bits - he.carved.bits);
      const ExtWeight v = psi.eval(diff).value();
      REQUIRE_FALSE(v.infinite);
      if (i >= he.tail_start) CHECK(v.value <= he.tail_bounds[i]);
    }
  }
}

TEST_CASE("exhaustivity chain on a four-deep space") {
  auto ctx = make_space(4);
  LevelParams lp = spread_params();  // same shape, one level deeper
  ClassOracle psi(make_base_class(ctx, lp), 1000000);
  MuOracle mu = psi.as_mu();
  // hole threshold strictly above a pair weight; thin threshold below the
  // value gap left by two witness covers
  const CertThresholds thr{DyadicWeight::from_pow2(9, -2), DyadicWeight::from_int(1)};

  Rng rng(0xC5A1);
  for (int trial = 0; trial < 4; ++trial) {
    // small disjoint sets: a few rank-4 atoms each
    std::vector<ClopenSet> E(3, empty_set(ctx));
    for (std::size_t i = 0; i < ctx->point_count(); ++i) {
      const std::uint64_t owner = rng.below(120);
      if (owner < E.size()) E[owner].bits.set(i);
    }
    auto rep = exhaustivity_chain(E, mu, 3, DyadicWeight::from_int(1), thr, lp, true);
    // every executed step carries verified thinness and honest bounds
    for (const auto& step : rep.steps) {
      CHECK(step.thin_ok);
      REQUIRE(step.step_bounds.size() == E.size());
    }
    // telescoped tail: re-check mu(E_i minus B_last) <= sum of step bounds
    if (!rep.steps.empty()) {
      const ClopenSet& last = rep.steps.back().B;
      for (std::size_t i = 0; i < E.size(); ++i) {
        const ExtWeight v = psi.eval(ClopenSet(ctx, E[i].bits - last.bits)).value();
        REQUIRE_FALSE(v.infinite);
        CHECK(v.value <= rep.tail_bounds[i]);
      }
    }
    if (rep.qualifies) {
      REQUIRE(rep.thin_item.has_value());
      CHECK(rep.thin_item->I.size() == 3);
      CHECK(is_thin_over_under(rep.thin_item->X, rep.thin_item->I, mu, thr.thin));
    }
  }
}

TEST_CASE("single-member chain") {
  auto ctx = make_space(3);
  LevelParams lp = spread_params();
  ClassOracle psi(make_base_class(ctx, lp), 1000000);
  MuOracle mu = psi.as_mu();
  ClopenSet e = empty_set(ctx);
  e.bits.set(0);
  auto rep = exhaustivity_chain({e}, mu, 2, DyadicWeight::from_int(1),
                                {DyadicWeight::from_pow2(5, -1), DyadicWeight::from_int(1)},
                                lp, true);
  CHECK(rep.steps.size() >= 1);
  CHECK(rep.ranks.size() >= 2);
}
