#include "covlab/tower.hpp"

#include <algorithm>
#include <sstream>

namespace covlab {

std::uint64_t TowerParams::m_of(int k) const {
  auto it = M.find(k);
  if (it == M.end()) throw std::invalid_argument("M undefined for level " + std::to_string(k));
  return it->second;
}

DyadicWeight TowerParams::budget(int k, const LevelParams& lp) const {
  if (k < 1) throw std::invalid_argument("budget levels start at 1");
  DyadicWeight c = c1;
  for (int j = 1; j < k; ++j) {
    const auto [an, ad] = lp.alpha_of(j);
    c = mul_exp2_floor(c, an, ad);
  }
  return c;
}

DyadicWeight TowerParams::thin_item_weight(int k, std::size_t card,
                                           const LevelParams& lp) const {
  const auto [an, ad] = lp.alpha_of(k);
  return pow_weight(lp.weight_scale, k, m_of(k), card, an, ad);
}

TowerParamFlags validate_tower_params(const TowerParams& tp, const LevelParams& lp) {
  TowerParamFlags flags;
  const DyadicWeight cap = DyadicWeight::from_int(32);
  for (int k = 1; k <= tp.p; ++k) {
    flags.c_below_32[k] = tp.budget(k, lp) <= cap;
    if (tp.M.count(k) == 0 || lp.alpha.count(k) == 0) continue;
    const auto [an, ad] = lp.alpha_of(k);
    // M(k) >= 2^(2k+10) * 2^((k+5)/alpha(k)) * (2^3 + N(k-1))
    const std::uint64_t n_prev = (k >= 2 && lp.N.count(k - 1)) ? lp.n_of(k - 1) : 0;
    const std::int64_t e = (2 * k + 10) * an + (k + 5) * ad;
    bool ok = false;
    if (e < (1 << 22)) {
      const BigInt lhs = boost::multiprecision::pow(BigInt(tp.m_of(k)), static_cast<unsigned>(an));
      const BigInt rhs = (BigInt(1) << static_cast<unsigned>(e)) *
                         boost::multiprecision::pow(BigInt(8 + n_prev), static_cast<unsigned>(an));
      ok = lhs >= rhs;
    }
    flags.m_growth_ok[k] = ok;
  }
  return flags;
}

BudgetBoundReport verify_budget_bound(int k_max) {
  BudgetBoundReport rep;
  rep.k_max = k_max;
  // Fixed-point interval sum of alpha(j) = 1/(j+5)^3 at 2^-80 resolution.
  const int kShift = 80;
  const BigInt one = BigInt(1) << kShift;
  BigInt lo = 0, hi = 0;
  for (int j = 1; j <= k_max; ++j) {
    const BigInt den = BigInt(j + 5) * (j + 5) * (j + 5);
    const BigInt q = one / den;  // floor
    lo += q;
    hi += q + 1;
  }
  // Tail: sum_{j>k} (j+5)^-3 < 1/(2 (k+5)^2).
  const BigRational tail(1, BigInt(2) * (k_max + 5) * (k_max + 5));
  const BigRational s_hi = BigRational(hi, one);
  rep.partial_exponent_hi = BigRational(2) * s_hi;

  // Rational upper bound for 2^x = e^(x ln 2), x in [0, 1/4):
  // series through x^2 plus a remainder cap y^3/6 * 1/(1-y).
  auto exp2_upper = [](const BigRational& x) {
    const BigRational ln2_hi(69314718056LL, BigInt("100000000000"));
    const BigRational y = x * ln2_hi;
    BigRational s = BigRational(1) + y + y * y / 2;
    s += y * y * y / (BigRational(6) * (BigRational(1) - y));
    return s;
  };
  rep.limit_upper = BigRational(16) * exp2_upper(BigRational(2) * (s_hi + tail));
  // Budgets increase in k, so the limit bound covers every finite level.
  rep.all_below_32 = rep.limit_upper < BigRational(32);
  return rep;
}

TowerContext::TowerContext(SpacePtr ctx, LevelParams lp, TowerParams tp, WeightedClass base,
                           std::map<int, WeightedClass> thin_candidates,
                           std::uint64_t oracle_budget)
    : ctx_(std::move(ctx)),
      lp_(std::move(lp)),
      tp_(std::move(tp)),
      base_(std::move(base)),
      thin_(std::move(thin_candidates)),
      budget_(oracle_budget) {
  for (const auto& [k, cls] : thin_)
    if (k < 1 || k >= tp_.p)
      throw std::invalid_argument("thin candidates must sit at levels 1..p-1");
}

const WeightedClass& TowerContext::explicit_class(int k) const {
  if (k < 1 || k > tp_.p) throw std::invalid_argument("tower level out of range");
  std::lock_guard<std::mutex> lk(mu_);
  auto it = classes_.find(k);
  if (it != classes_.end()) return *it->second;
  auto cls = std::make_unique<WeightedClass>();
  cls->ctx = ctx_;
  cls->label = "tower-" + std::to_string(k);
  cls->items = base_.items;
  for (const auto& [r, cand] : thin_)
    if (r >= k)
      for (const auto& item : cand.items) cls->items.push_back(item);
  return *classes_.emplace(k, std::move(cls)).first->second;
}

const ClassOracle& TowerContext::oracle(int k) const {
  const WeightedClass& cls = explicit_class(k);
  std::lock_guard<std::mutex> lk(mu_);
  auto it = oracles_.find(k);
  if (it != oracles_.end()) return *it->second;
  return *oracles_.emplace(k, std::make_unique<ClassOracle>(cls, budget_)).first->second;
}

TowerContext::FlaggedEval TowerContext::eval(int k, const ClopenSet& B) const {
  FlaggedEval out;
  out.cover = oracle(k).eval(B);
  out.exact_over_explicit = out.cover.optimal;
  out.upper_bound_for_ideal = true;
  return out;
}

std::pair<bool, DyadicWeight> thin_member(const TowerContext& tc, const ClopenSet& X,
                                          const CoordSet& I, int k) {
  const TowerParams& tp = tc.tower_params();
  if (k >= tp.p) throw std::invalid_argument("thin classes live below the top level");
  if (I.empty() || I.size() > tp.m_of(k))
    throw std::invalid_argument("marked set size out of range for the level class");
  const DyadicWeight w = tp.thin_item_weight(k, I.size(), tc.level_params());
  const bool ok = is_thin_over_under(X, I, tc.mu(k + 1), tp.thresholds.thin);
  return {ok, w};
}

MarkedWeightedSet interval_pullback(const TowerContext& tc, const MarkedWeightedSet& item,
                                    int m0, int n0, const AtomId& A, bool verify,
                                    bool* thin_ok) {
  if (item.origin != MarkedWeightedSet::Origin::kThin || item.level < 1)
    throw std::invalid_argument("interval pullback applies to thin-class items");
  if (!(m0 < n0)) throw std::invalid_argument("window must be a nonempty interval");
  if (A.rank != m0) throw std::invalid_argument("atom rank must match the window base");
  std::vector<int> inside;
  for (int r : item.I.ranks())
    if (m0 < r && r <= n0) inside.push_back(r);
  if (inside.empty())
    throw std::invalid_argument("the marked ranks miss the window interval");

  MarkedWeightedSet out;
  out.origin = MarkedWeightedSet::Origin::kThin;
  out.level = item.level;
  out.I = CoordSet(inside);
  out.X = envelope(translate_preimage(A, item.X), n0);
  const auto [an, ad] = tc.level_params().alpha_of(item.level);
  out.w = pow_weight(item.w.to_rational(), 0, item.I.size(), out.I.size(), an, ad);
  if (verify && thin_ok != nullptr)
    *thin_ok = is_thin_over_under(out.X, out.I, tc.mu(item.level + 1),
                                  tc.tower_params().thresholds.thin);
  return out;
}

AtomAvoidOutcome atom_avoid(const TowerContext& tc, const AtomId& A, const ClopenSet& thin_set,
                            const WeightedClass& window_class, int m_l, int n_l, int q) {
  const SpacePtr& ctx = tc.space();
  if (A.rank != m_l) throw std::invalid_argument("atom rank must equal the window base");
  std::vector<int> wr;
  for (int r = m_l + 1; r <= n_l; ++r) wr.push_back(r);
  const CoordSet window(wr);

  AtomAvoidOutcome out;
  ClopenSet blocked = empty_set(ctx);
  for (const auto& item : window_class.items) {
    MarkedWeightedSet pulled;
    if (item.origin == MarkedWeightedSet::Origin::kSection) {
      pulled = project_item(ctx, item, window, tc.level_params());
    } else if (item.origin == MarkedWeightedSet::Origin::kThin && item.level >= q + 1) {
      pulled = interval_pullback(tc, item, m_l, n_l, A);
    } else {
      throw CertificateError("window class item of unexpected kind at level " +
                             std::to_string(item.level));
    }
    blocked.bits |= pulled.X.bits;
    out.pullback_weight += pulled.w;
    out.class_weight += item.w;
  }

  const ClopenSet hole = max_hole(A, thin_set, n_l);
  const ClopenSet room(ctx, translate_preimage(A, hole).bits - blocked.bits);
  if (room.empty())
    throw CertificateError(
        "atom avoidance found no room: pullback weight " + out.pullback_weight.to_decimal() +
        " (class weight " + out.class_weight.to_decimal() + ") blocks every hole atom");

  // Lowest rank-n_l atom inside the room, rerouted into A.
  const std::uint64_t first = room.bits.find_first();
  const std::uint64_t raw = first % ctx->atom_count(n_l);
  const std::uint64_t suffix = raw - raw % ctx->atom_count(m_l);
  out.chosen = AtomId{n_l, A.index + suffix};

  const ClopenSet cyl = atom_cylinder(ctx, out.chosen);
  if (!cyl.bits.disjoint_with(thin_set.bits))
    throw CertificateError("avoiding atom still meets the thin set");
  for (const auto& item : window_class.items)
    if (!cyl.bits.disjoint_with(item.X.bits))
      throw CertificateError("avoiding atom still meets the window class");
  return out;
}

WindowMap WindowMap::identity(const SpacePtr& ctx) {
  WindowMap m;
  m.ctx_ = ctx;
  m.table_.resize(ctx->point_count());
  for (std::size_t i = 0; i < m.table_.size(); ++i)
    m.table_[i] = static_cast<std::uint32_t>(i);
  return m;
}

WindowMap WindowMap::build(const SpacePtr& ctx,
                           const std::vector<std::pair<int, int>>& windows,
                           const std::vector<std::map<std::uint64_t, std::uint64_t>>& choices) {
  if (ctx->point_count() > (std::uint64_t{1} << 22))
    throw std::invalid_argument("window map table too large at this depth");
  if (windows.size() != choices.size())
    throw std::invalid_argument("one choice table per window is required");
  for (std::size_t l = 0; l + 1 < windows.size(); ++l)
    if (windows[l].second > windows[l + 1].first)
      throw std::invalid_argument("windows must be ordered and disjoint");

  WindowMap m;
  m.ctx_ = ctx;
  m.windows_ = windows;
  m.table_.resize(ctx->point_count());
  for (std::uint64_t y = 0; y < ctx->point_count(); ++y) {
    std::uint64_t z = y;
    for (std::size_t l = 0; l < windows.size(); ++l) {
      const auto [ml, nl] = windows[l];
      const std::uint64_t am = ctx->atom_count(ml);
      const std::uint64_t an = ctx->atom_count(nl);
      const std::uint64_t prefix = z % am;
      auto it = choices[l].find(prefix);
      if (it == choices[l].end())
        throw std::invalid_argument("missing avoidance choice for a window atom");
      const std::uint64_t target = it->second;  // rank-nl atom index
      if (target % am != prefix)
        throw std::invalid_argument("avoidance choice does not extend its atom");
      z = target + (z - z % an);
    }
    m.table_[y] = static_cast<std::uint32_t>(z);
  }
  return m;
}

Point WindowMap::apply(const Point& y) const {
  return index_to_point(*ctx_, table_[point_to_index(*ctx_, y)]);
}

ClopenSet WindowMap::preimage(const ClopenSet& X) const {
  ClopenSet out = empty_set(ctx_);
  kernels::gather_map(X.bits.data(), table_.data(), out.bits.size(), out.bits.data());
  return out;
}

ClopenSet WindowMap::image_of_space() const {
  ClopenSet out = empty_set(ctx_);
  for (std::uint32_t t : table_) out.bits.set(t);
  return out;
}

CoordSet WindowMap::window_ranks() const {
  std::vector<int> rs;
  for (const auto& [m, n] : windows_)
    for (int r = m + 1; r <= n; ++r) rs.push_back(r);
  return CoordSet(rs);
}

PullbackOutcome window_pullback(const TowerContext& tc, const MarkedWeightedSet& item,
                                const WindowMap& xi, const WindowSelection& sel, int q,
                                bool verify) {
  const SpacePtr& ctx = tc.space();
  const CoordSet wset = sel.window_ranks;
  PullbackOutcome out;
  const BigRational ratio_cap =
      pow2_upper(tc.level_params().alpha_of(q).first, tc.level_params().alpha_of(q).second);
  const BigRational slack(1, BigInt(1) << 38);

  if (item.origin == MarkedWeightedSet::Origin::kSection) {
    if (item.I.intersect(wset).empty()) {
      // untouched: the preimage is the set itself
      out.item = item;
      out.case_id = 1;
      out.superset_ok = verify ? xi.preimage(item.X) == item.X : true;
      out.weight_ok = true;
      return out;
    }
    if (item.level < q)
      throw CertificateError(
          "a low-level section item meets the windows; the forbidden-rank "
          "restriction was violated upstream");
    std::vector<int> comp;
    for (int r = 1; r <= ctx->depth(); ++r)
      if (!wset.contains(r)) comp.push_back(r);
    out.item = project_item(ctx, item, CoordSet(comp), tc.level_params());
    out.case_id = 2;
    out.superset_ok = xi.preimage(item.X).bits.subset_of(out.item.X.bits);
    out.weight_ok = out.item.w.to_rational() <=
                    item.w.to_rational() * ratio_cap + slack;
    return out;
  }

  if (item.level < q + 1)
    throw CertificateError("thin item below the recursion level cannot be pulled back");
  out.case_id = 3;
  out.item.origin = MarkedWeightedSet::Origin::kThin;
  out.item.level = item.level;
  out.item.X = xi.preimage(item.X);
  // Drop the window ranks and, per window, the closest marked rank at or
  // below the window base.
  std::vector<int> keep;
  std::vector<int> anchors;
  for (const auto& [ml, nl] : sel.windows) {
    int anchor = 0;
    for (int r : item.I.ranks())
      if (r <= ml) anchor = std::max(anchor, r);
    if (anchor > 0) anchors.push_back(anchor);
  }
  for (int r : item.I.ranks()) {
    if (wset.contains(r)) continue;
    if (std::find(anchors.begin(), anchors.end(), r) != anchors.end()) continue;
    keep.push_back(r);
  }
  if (keep.empty())
    throw CertificateError("window pullback erased every marked rank of a thin item");
  out.item.I = CoordSet(keep);
  const auto [an, ad] = tc.level_params().alpha_of(item.level);
  out.item.w = pow_weight(item.w.to_rational(), 0, item.I.size(), out.item.I.size(), an, ad);
  out.superset_ok = true;  // the output is exactly the preimage
  out.weight_ok =
      out.item.w.to_rational() <= item.w.to_rational() * ratio_cap + slack;
  if (verify)
    out.thin_ok = is_thin_over_under(out.item.X, out.item.I, tc.mu(item.level + 1),
                                     tc.tower_params().thresholds.thin);
  return out;
}

namespace {

StageCheck make_check(std::string stage, std::string name, std::string lhs, std::string rhs,
                      bool ok) {
  return StageCheck{std::move(stage), std::move(name), std::move(lhs), std::move(rhs), ok};
}

CertificateReport fail_report(int q, std::string stage, std::string detail,
                              std::vector<StageCheck> checks) {
  CertificateReport rep;
  rep.q = q;
  rep.failed_stage = std::move(stage);
  rep.detail = std::move(detail);
  rep.checks = std::move(checks);
  return rep;
}

}  // namespace

CertificateReport level_certificate(const TowerContext& tc, const WeightedClass& F, int q) {
  const SpacePtr& ctx = tc.space();
  const TowerParams& tp = tc.tower_params();
  const LevelParams& lp = tc.level_params();
  CertificateReport rep;
  rep.q = q;
  rep.family_weight = F.total_weight();
  rep.f1_count = rep.f2_count = 0;

  const DyadicWeight cq = tp.budget(q, lp);
  rep.checks.push_back(make_check("budget", "family weight below the level budget",
                                  rep.family_weight.to_decimal(), cq.to_decimal(),
                                  rep.family_weight < cq));
  if (!(rep.family_weight < cq)) {
    rep.failed_stage = "budget";
    rep.detail = "family weight is not below the level budget";
    return rep;
  }

  // Base level: every item is a section item; a transversal or a direct
  // complement scan produces the point.
  if (q >= tp.p) {
    for (const auto& it : F.items)
      if (it.origin != MarkedWeightedSet::Origin::kSection) {
        rep.failed_stage = "base-split";
        rep.detail = "non-section item reached the base level";
        return rep;
      }
    Transversal tr = transversal_certificate(ctx, F, cq);
    if (tr.success) {
      rep.base_route = "transversal";
      rep.point = tr.point;
      rep.success = true;
      return rep;
    }
    const ClopenSet uni = F.union_of();
    if (uni.full()) {
      rep.failed_stage = "base-scan";
      rep.detail = "the family covers the whole space";
      return rep;
    }
    rep.base_route = "complement-scan";
    rep.point = index_to_point(*ctx, (~uni.bits).find_first());
    rep.success = true;
    return rep;
  }

  // Split into the level family and the deeper family.
  std::vector<std::size_t> f1_idx;
  WeightedClass f2{ctx, "F2", {}};
  std::vector<std::size_t> f2_src;
  for (std::size_t i = 0; i < F.items.size(); ++i) {
    const auto& it = F.items[i];
    if (it.origin == MarkedWeightedSet::Origin::kThin && it.level == q) {
      f1_idx.push_back(i);
    } else if (it.origin == MarkedWeightedSet::Origin::kThin && it.level < q) {
      rep.failed_stage = "split";
      rep.detail = "thin item below the current level is outside the class";
      return rep;
    } else {
      f2.items.push_back(it);
      f2_src.push_back(i);
    }
  }
  rep.f1_count = f1_idx.size();
  rep.f2_count = f2.items.size();

  // Forbidden ranks: marks of low-level section items.
  std::vector<int> fr;
  for (const auto& it : f2.items)
    if (it.origin == MarkedWeightedSet::Origin::kSection && it.level < q)
      for (int r : it.I.ranks()) fr.push_back(r);
  const CoordSet forbidden(fr);

  WindowMap xi = WindowMap::identity(ctx);
  WindowSelection sel;
  std::vector<std::size_t> f4_sel;
  if (f1_idx.empty()) {
    // No windows: the pullback is the identity on all of F2.
    for (std::size_t i = 0; i < f2.items.size(); ++i) f4_sel.push_back(i);
    rep.f3_count = 0;
    rep.f4_count = f2.items.size();
  } else {
    const std::size_t s = f1_idx.size();
    std::vector<CoordSet> fams;
    std::size_t min_card = SIZE_MAX;
    for (std::size_t i : f1_idx) {
      fams.push_back(F.items[i].I);
      min_card = std::min(min_card, F.items[i].I.size());
    }
    int t = tp.t_select;
    if (t <= 0) t = static_cast<int>(min_card / s);
    rep.t = t;
    rep.checks.push_back(make_check("selection", "block size at least 2", std::to_string(t),
                                    "2", t >= 2));
    if (t < 2) {
      rep.failed_stage = "selection";
      rep.detail = "marked sets too small to form selection blocks";
      return rep;
    }

    ChainSelection chains;
    try {
      chains = chain_select(fams, t);
    } catch (const std::exception& e) {
      rep.failed_stage = "selection";
      rep.detail = e.what();
      return rep;
    }
    try {
      sel = select_windows(chains.blocks, f2, forbidden, tp.window_fraction);
    } catch (const std::exception& e) {
      rep.failed_stage = "window-choice";
      rep.detail = e.what();
      return rep;
    }
    rep.selected_u = sel.u;
    rep.windows = sel.windows;
    rep.f3_count = sel.f3.size();
    rep.f4_count = sel.f4.size();
    rep.f3_weight = sel.covered_weight;
    rep.checks.push_back(make_check(
        "window-choice", "covered weight within the counting bound",
        sel.covered_weight.to_decimal(), rational_to_string(sel.selection_bound),
        sel.covered_weight.to_rational() <= sel.selection_bound));
    // Low-level section items must stay clear of the windows.
    bool a_ok = true;
    for (std::size_t i : sel.f3) {
      const auto& it = f2.items[i];
      if (it.origin == MarkedWeightedSet::Origin::kSection && it.level < q) a_ok = false;
    }
    rep.checks.push_back(make_check("window-choice", "forbidden ranks avoid the windows",
                                    a_ok ? "clear" : "hit", "clear", a_ok));
    if (!a_ok) {
      rep.failed_stage = "window-choice";
      rep.detail = "a low-level section item landed in the covered class";
      return rep;
    }
    // The per-window classes must cover the covered class.
    std::vector<bool> seen(f2.items.size(), false);
    for (const auto& per : sel.f3_per_window)
      for (std::size_t i : per) seen[i] = true;
    bool pig_ok = true;
    for (std::size_t i : sel.f3) pig_ok = pig_ok && seen[i];
    rep.checks.push_back(make_check("window-choice", "per-window split covers the class",
                                    pig_ok ? "covered" : "missed", "covered", pig_ok));
    if (!pig_ok) {
      rep.failed_stage = "window-choice";
      rep.detail = "the per-window pigeonhole fraction is too large";
      return rep;
    }

    // Per window and per atom: avoid the thin set and the window class.
    std::vector<std::map<std::uint64_t, std::uint64_t>> choices(s);
    for (std::size_t l = 0; l < s; ++l) {
      const auto [ml, nl] = sel.windows[l];
      const ClopenSet& xl = F.items[f1_idx[chains.order[l]]].X;
      WeightedClass f3l{ctx, "F3l", {}};
      for (std::size_t i : sel.f3_per_window[l]) f3l.items.push_back(f2.items[i]);
      for (std::uint64_t a = 0; a < ctx->atom_count(ml); ++a) {
        try {
          AtomAvoidOutcome oc = atom_avoid(tc, AtomId{ml, a}, xl, f3l, ml, nl, q);
          choices[l][a] = oc.chosen.index;
          if (a == 0)
            rep.checks.push_back(make_check(
                "atom-avoid", "window " + std::to_string(l) + " pullback below half threshold",
                oc.pullback_weight.to_decimal(),
                tp.thresholds.thin.to_decimal(),
                oc.pullback_weight < tp.thresholds.thin));
        } catch (const CertificateError& e) {
          rep.failed_stage = "atom-avoid";
          rep.detail = e.what();
          return rep;
        }
      }
    }
    try {
      xi = WindowMap::build(ctx, sel.windows, choices);
    } catch (const std::exception& e) {
      rep.failed_stage = "window-map";
      rep.detail = e.what();
      return rep;
    }

    // Image avoidance: the rewritten space misses the level sets and the
    // per-window classes, bit for bit.
    const ClopenSet image = xi.image_of_space();
    for (std::size_t l = 0; l < s; ++l) {
      const ClopenSet& xl = F.items[f1_idx[chains.order[l]]].X;
      const bool miss_thin = image.bits.disjoint_with(xl.bits);
      bool miss_class = true;
      for (std::size_t i : sel.f3_per_window[l])
        miss_class = miss_class && image.bits.disjoint_with(f2.items[i].X.bits);
      rep.checks.push_back(make_check("image", "image avoids window " + std::to_string(l),
                                      miss_thin && miss_class ? "disjoint" : "meets",
                                      "disjoint", miss_thin && miss_class));
      if (!(miss_thin && miss_class)) {
        rep.failed_stage = "image";
        rep.detail = "the rewritten space still meets an avoided set";
        return rep;
      }
    }
    f4_sel = sel.f4;
  }

  // Pull the deep family back through the map.
  WeightedClass pulled{ctx, "G", {}};
  for (std::size_t i : f4_sel) {
    try {
      PullbackOutcome oc = window_pullback(tc, f2.items[i], xi, sel, q);
      rep.checks.push_back(make_check(
          "pullback", "item case " + std::to_string(oc.case_id) + " dominates the preimage",
          oc.superset_ok ? "contains" : "misses", "contains", oc.superset_ok));
      rep.checks.push_back(make_check("pullback", "item weight within the level ratio",
                                      oc.item.w.to_decimal(), "ratio-capped", oc.weight_ok));
      if (!oc.superset_ok || !oc.weight_ok) {
        rep.failed_stage = "pullback";
        rep.detail = "a pullback item failed its domination or ratio check";
        return rep;
      }
      pulled.items.push_back(std::move(oc.item));
    } catch (const CertificateError& e) {
      rep.failed_stage = "pullback";
      rep.detail = e.what();
      return rep;
    }
  }
  rep.pullback_weight = pulled.total_weight();
  const DyadicWeight cq1 = tp.budget(q + 1, lp);
  rep.checks.push_back(make_check("pullback", "pulled family below the next budget",
                                  rep.pullback_weight.to_decimal(), cq1.to_decimal(),
                                  rep.pullback_weight < cq1));
  if (!(rep.pullback_weight < cq1)) {
    rep.failed_stage = "pullback";
    rep.detail = "pulled family weight reached the next level budget";
    return rep;
  }

  CertificateReport below = level_certificate(tc, pulled, q + 1);
  const bool below_ok = below.success;
  Point y = below.point;
  rep.inner.push_back(std::move(below));
  if (!below_ok) {
    rep.failed_stage = "recursion";
    rep.detail = "the deeper certificate failed";
    return rep;
  }

  Point z = xi.apply(y);
  for (const auto& it : F.items)
    if (point_in(it.X, z)) {
      rep.failed_stage = "final";
      rep.detail = "the produced point lies inside a family set";
      return rep;
    }
  rep.checks.push_back(make_check("final", "point escapes every family set", "outside",
                                  "outside", true));
  rep.point = std::move(z);
  rep.success = true;
  return rep;
}

}  // namespace covlab
