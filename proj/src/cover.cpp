#include "covlab/cover.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>

#include "json.hpp"

namespace covlab {

namespace {
using Json = nlohmann::ordered_json;

// Search state over the original atom space: bits outside B are treated
// as covered from the start, so masks need no re-indexing.
struct Instance {
  const WeightedClass* cls = nullptr;
  std::size_t nbits = 0;
  std::size_t universe = 0;               // atoms of B
  Bitvec base_covered;                    // complement of B
  std::vector<DyadicWeight> weights;
  std::vector<std::size_t> by_weight;     // ascending (weight, index)
  std::vector<std::size_t> by_density;    // ascending weight / |X cap B|
  std::vector<DyadicWeight> density;      // floor(w_i / |X_i cap B|)

  const Bitvec& mask(std::size_t i) const { return cls->items[i].X.bits; }
  std::size_t size() const { return cls->items.size(); }
};

std::size_t fresh_gain(const Bitvec& mask, const Bitvec& covered) {
  return kernels::popcount_andnot(mask.data(), covered.data(), mask.size());
}

DyadicWeight floor_rational(const BigRational& x) {
  const BigInt num = boost::multiprecision::numerator(x) << DyadicWeight::kFracBits;
  return DyadicWeight(num / boost::multiprecision::denominator(x));
}

Instance make_instance(const WeightedClass& C, const ClopenSet& B, const ClassIndex* index) {
  Instance ins;
  ins.cls = &C;
  ins.nbits = B.bits.size();
  ins.universe = B.bits.count();
  ins.base_covered = ~B.bits;
  ins.weights.reserve(C.items.size());
  for (const auto& it : C.items) ins.weights.push_back(it.w);
  ClassIndex local;
  const ClassIndex& idx = index != nullptr ? *index : (local = build_class_index(C), local);
  ins.by_weight = idx.by_weight;
  ins.by_density = idx.by_density;
  ins.density = idx.density;
  return ins;
}

// Admissible completion bound, the max of two relaxations:
//  - max over uncovered atoms of the cheapest allowed item covering it;
//  - the static-density counting bound: any cover S satisfies
//    w(S) >= sum rho_i * fresh_i(S) >= greedy fractional fill of the
//    deficit in ascending rho order, rho_i = w_i / |X_i|.
// Returns nullopt when some uncovered atom has no allowed cover.
std::optional<DyadicWeight> admissible_bound(const Instance& ins, const Bitvec& covered,
                                             const Bitvec& excluded) {
  const std::size_t deficit = ins.nbits - covered.count();
  if (deficit == 0) return DyadicWeight();

  DyadicWeight atom_bound;
  {
    Bitvec acc = covered;
    bool reached = false;
    for (std::size_t idx : ins.by_weight) {
      if (excluded.test(idx)) continue;
      acc |= ins.mask(idx);
      if (acc.count() == ins.nbits) {
        atom_bound = ins.weights[idx];
        reached = true;
        break;
      }
    }
    if (!reached) return std::nullopt;
  }

  DyadicWeight counting;
  std::size_t need = deficit;
  for (std::size_t i : ins.by_density) {
    if (need == 0) break;
    if (excluded.test(i)) continue;
    const std::size_t gain = fresh_gain(ins.mask(i), covered);
    if (gain == 0) continue;
    const std::size_t take = std::min(need, gain);
    counting += ins.density[i] * static_cast<std::int64_t>(take);
    need -= take;
  }
  DyadicWeight best = counting > atom_bound ? counting : atom_bound;

  // For small deficits: deficit * min_i (w_i / fresh_i), order-free and
  // much tighter than the static densities on small targets.
  if (deficit <= 128) {
    BigInt bn;
    std::size_t bd = 0;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (excluded.test(i)) continue;
      const std::size_t gain = fresh_gain(ins.mask(i), covered);
      if (gain == 0) continue;
      if (bd == 0 || ins.weights[i].numerator() * bd < bn * gain) {
        bn = ins.weights[i].numerator();
        bd = gain;
      }
    }
    if (bd != 0) {
      const DyadicWeight ratio_bound(bn * deficit / bd);
      if (ratio_bound > best) best = ratio_bound;
    }
  }
  return best;
}

struct GreedyOutcome {
  bool feasible = false;
  DyadicWeight cost;
  std::vector<std::size_t> picks;
};

GreedyOutcome greedy_cover(const Instance& ins, const Bitvec& covered0, const Bitvec& excluded) {
  GreedyOutcome out;
  Bitvec covered = covered0;
  while (covered.count() != ins.nbits) {
    std::size_t best = ins.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (excluded.test(i)) continue;
      const std::size_t gain = fresh_gain(ins.mask(i), covered);
      if (gain == 0) continue;
      if (best == ins.size()) {
        best = i;
        best_gain = gain;
        continue;
      }
      // weight/gain ratio compare, exact: w_i * g_best < w_best * g_i
      const auto lhs = ins.weights[i].numerator() * best_gain;
      const auto rhs = ins.weights[best].numerator() * gain;
      if (lhs < rhs) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == ins.size()) return out;  // stuck
    covered |= ins.mask(best);
    out.cost += ins.weights[best];
    out.picks.push_back(best);
  }
  out.feasible = true;
  return out;
}

struct Node {
  Bitvec covered;
  Bitvec excluded;
  DyadicWeight cost;
  DyadicWeight bound;  // cost + admissible completion bound
  std::vector<std::size_t> included;
  std::uint64_t seq = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap
    return a.seq > b.seq;
  }
};

// Core search shared by min_cover and the threshold decision procedure.
CoverResult search(const WeightedClass& C, const ClopenSet& B, std::uint64_t node_budget,
                   const DyadicWeight* stop_threshold, std::optional<bool>* decided,
                   const ClassIndex* index) {
  detail::require_same_ctx(C.items.empty() ? B : C.items.front().X, B);
  for (const auto& it : C.items) detail::require_same_ctx(it.X, B);

  CoverResult res;
  Instance ins = make_instance(C, B, index);
  if (ins.universe == 0) {  // empty target: the empty subfamily covers it
    res.optimal = true;
    res.coverable = true;
    return res;
  }

  const Bitvec no_excluded(C.items.size());
  const Bitvec& none = ins.base_covered;
  auto root_bound = admissible_bound(ins, none, no_excluded);
  if (!root_bound.has_value()) {
    res.optimal = true;
    res.coverable = false;
    return res;
  }
  if (stop_threshold != nullptr && !(*root_bound < *stop_threshold)) {
    *decided = true;  // already provably at or above the threshold
    res.coverable = true;
    res.lower = *root_bound;
    return res;
  }

  GreedyOutcome greedy = greedy_cover(ins, none, no_excluded);
  // Root bound is feasible, so greedy cannot get stuck.
  DyadicWeight incumbent = greedy.cost;
  std::vector<std::size_t> incumbent_picks = greedy.picks;
  res.coverable = true;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::uint64_t seq = 0;
  Node root{none, no_excluded, DyadicWeight(), *root_bound, {}, seq++};
  open.push(std::move(root));

  std::uint64_t expanded = 0;
  DyadicWeight frontier_lb = *root_bound;  // valid global lower bound
  bool exhausted = false;

  while (!open.empty()) {
    if (expanded >= node_budget) break;
    Node cur = open.top();
    open.pop();
    frontier_lb = cur.bound;
    if (!(cur.bound < incumbent)) {  // best-first: everything left is >=
      frontier_lb = incumbent;
      exhausted = true;
      break;
    }
    if (stop_threshold != nullptr) {
      if (!(frontier_lb < *stop_threshold)) {
        *decided = true;  // optimum >= threshold
        break;
      }
      if (incumbent < *stop_threshold) {
        *decided = false;  // a witness below threshold exists
        break;
      }
    }
    ++expanded;

    if (cur.covered.count() == ins.nbits) {
      if (cur.cost < incumbent) {
        incumbent = cur.cost;
        incumbent_picks = cur.included;
      }
      continue;
    }

    // Branch on the best weight-per-uncovered-atom item.
    std::size_t pick = ins.size();
    std::size_t pick_gain = 0;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (cur.excluded.test(i)) continue;
      const std::size_t gain = fresh_gain(ins.mask(i), cur.covered);
      if (gain == 0) continue;
      if (pick == ins.size()) {
        pick = i;
        pick_gain = gain;
        continue;
      }
      const auto lhs = ins.weights[i].numerator() * pick_gain;
      const auto rhs = ins.weights[pick].numerator() * gain;
      if (lhs < rhs) {
        pick = i;
        pick_gain = gain;
      }
    }
    if (pick == ins.size()) continue;  // nothing can extend: dead end

    // Include branch.
    {
      Node nxt;
      nxt.covered = cur.covered | ins.mask(pick);
      nxt.excluded = cur.excluded;
      nxt.cost = cur.cost + ins.weights[pick];
      nxt.included = cur.included;
      nxt.included.push_back(pick);
      auto b = admissible_bound(ins, nxt.covered, nxt.excluded);
      if (b.has_value()) {
        nxt.bound = nxt.cost + *b;
        if (nxt.bound < incumbent) {
          nxt.seq = seq++;
          open.push(std::move(nxt));
        }
      }
    }
    // Exclude branch.
    {
      Node nxt;
      nxt.covered = cur.covered;
      nxt.excluded = cur.excluded;
      nxt.excluded.set(pick);
      nxt.cost = cur.cost;
      nxt.included = cur.included;
      auto b = admissible_bound(ins, nxt.covered, nxt.excluded);
      if (b.has_value()) {
        nxt.bound = nxt.cost + *b;
        if (nxt.bound < incumbent) {
          nxt.seq = seq++;
          open.push(std::move(nxt));
        }
      }
    }
  }

  if (open.empty()) exhausted = true;
  res.nodes = expanded;
  res.upper = incumbent;
  res.witness = incumbent_picks;
  std::sort(res.witness.begin(), res.witness.end());
  if (exhausted) {
    res.optimal = true;
    res.lower = incumbent;
  } else {
    res.optimal = false;
    res.lower = frontier_lb < incumbent ? frontier_lb : incumbent;
  }
  return res;
}

}  // namespace

DyadicWeight WeightedClass::total_weight() const {
  DyadicWeight t;
  for (const auto& it : items) t += it.w;
  return t;
}

ClopenSet WeightedClass::union_of() const {
  ClopenSet u = empty_set(ctx);
  for (const auto& it : items) u.bits |= it.X.bits;
  return u;
}

ClassIndex build_class_index(const WeightedClass& C) {
  ClassIndex idx;
  idx.by_weight.resize(C.items.size());
  for (std::size_t i = 0; i < idx.by_weight.size(); ++i) idx.by_weight[i] = i;
  std::stable_sort(idx.by_weight.begin(), idx.by_weight.end(), [&](std::size_t a, std::size_t b) {
    if (C.items[a].w != C.items[b].w) return C.items[a].w < C.items[b].w;
    return a < b;
  });
  // Static density order for the counting bound: weight per full mask size,
  // rounded down onto the dyadic grid (still admissible for any target).
  idx.density.resize(C.items.size());
  std::vector<std::pair<BigRational, std::size_t>> rho;
  for (std::size_t i = 0; i < C.items.size(); ++i) {
    const std::size_t sz = C.items[i].X.bits.count();
    if (sz == 0) {
      idx.density[i] = DyadicWeight();
      continue;
    }
    const BigRational r = C.items[i].w.to_rational() / BigRational(sz);
    idx.density[i] = floor_rational(r);
    rho.emplace_back(r, i);
  }
  std::sort(rho.begin(), rho.end());
  idx.by_density.reserve(rho.size());
  for (const auto& [r, i] : rho) idx.by_density.push_back(i);
  return idx;
}

CoverResult min_cover(const WeightedClass& C, const ClopenSet& B, std::uint64_t node_budget,
                      const ClassIndex* index) {
  return search(C, B, node_budget, nullptr, nullptr, index);
}

std::optional<bool> min_cover_at_least(const WeightedClass& C, const ClopenSet& B,
                                       const DyadicWeight& threshold,
                                       std::uint64_t node_budget, const ClassIndex* index) {
  std::optional<bool> decided;
  CoverResult r = search(C, B, node_budget, &threshold, &decided, index);
  if (decided.has_value()) return decided;
  if (!r.coverable) return true;  // infinite value
  if (r.optimal) return !(r.upper < threshold);
  if (!(r.lower < threshold)) return true;
  if (r.upper < threshold) return false;
  return std::nullopt;
}

DyadicWeight capped_min_cover(const WeightedClass& C, const ClopenSet& B, int q,
                              std::uint64_t node_budget) {
  const DyadicWeight share = DyadicWeight::round_rational(BigRational(1, q + 1));
  for (const auto& it : C.items)
    if (it.w != share)
      throw std::invalid_argument("capped cover requires uniform weights 1/(q+1)");
  const DyadicWeight one = DyadicWeight::from_int(1);
  CoverResult r = min_cover(C, B, node_budget);
  if (!r.coverable) return one;
  return r.upper < one ? r.upper : one;
}

AxiomReport check_submeasure_axioms(
    const SubmeasureFn& nu, const SpacePtr& ctx,
    const std::vector<std::pair<ClopenSet, ClopenSet>>& samples) {
  AxiomReport rep;
  const ExtWeight at_empty = nu(empty_set(ctx));
  if (at_empty.infinite || !at_empty.value.is_zero())
    rep.violations.push_back({"empty", 0, "value at the empty set is not 0"});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [A, B] = samples[i];
    const ClopenSet uni(ctx, A.bits | B.bits);
    const ClopenSet inter(ctx, A.bits & B.bits);
    const ExtWeight va = nu(A);
    const ExtWeight vb = nu(B);
    const ExtWeight vu = nu(uni);
    const ExtWeight vi = nu(inter);
    if (!(vi <= va))
      rep.violations.push_back({"monotone", i, "value(A-and-B) > value(A)"});
    if (!(va <= vu))
      rep.violations.push_back({"monotone", i, "value(A) > value(A-or-B)"});
    if (!(vu <= va + vb))
      rep.violations.push_back({"subadditive", i, "value(A-or-B) > value(A) + value(B)"});
    ++rep.pairs_checked;
  }
  return rep;
}

WeightedClass dominance_prune(const WeightedClass& C) {
  WeightedClass out;
  out.ctx = C.ctx;
  out.label = C.label;
  const std::size_t n = C.items.size();
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && !drop[i]; ++j) {
      if (j == i || drop[j]) continue;
      const auto& xi = C.items[i];
      const auto& xj = C.items[j];
      if (!xi.X.bits.subset_of(xj.X.bits) || xj.w > xi.w) continue;
      const bool equal_sets = xj.X.bits.subset_of(xi.X.bits);
      if (equal_sets && xj.w == xi.w) {
        if (j < i) drop[i] = true;  // keep the first of exact duplicates
      } else {
        drop[i] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) out.items.push_back(C.items[i]);
  return out;
}

void write_class_jsonl(std::ostream& os, const WeightedClass& C) {
  for (const auto& it : C.items) {
    Json j;
    j["X"] = it.X.bits.to_hex();
    j["I"] = it.I.ranks();
    j["w"] = it.w.to_decimal();
    if (!it.sections.empty()) {
      Json tau = Json::object();
      for (const auto& [rank, v] : it.sections) tau[std::to_string(rank)] = v;
      j["tau"] = tau;
    }
    if (it.level >= 0) j["level"] = it.level;
    if (it.origin == MarkedWeightedSet::Origin::kSection) j["origin"] = "section";
    if (it.origin == MarkedWeightedSet::Origin::kThin) j["origin"] = "thin";
    os << j.dump() << "\n";
  }
}

WeightedClass read_class_jsonl(std::istream& is, const SpacePtr& ctx, std::string label) {
  WeightedClass C;
  C.ctx = ctx;
  C.label = std::move(label);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    MarkedWeightedSet it;
    it.X = ClopenSet(ctx, Bitvec::from_hex(ctx->point_count(), j.at("X").get<std::string>()));
    it.I = CoordSet(j.at("I").get<std::vector<int>>());
    it.w = DyadicWeight::parse(j.at("w").get<std::string>());
    if (j.contains("tau"))
      for (const auto& [k, v] : j.at("tau").items())
        it.sections[std::stoi(k)] = v.get<std::uint32_t>();
    if (j.contains("level")) it.level = j.at("level").get<int>();
    if (j.contains("origin")) {
      const std::string o = j.at("origin").get<std::string>();
      it.origin = o == "section" ? MarkedWeightedSet::Origin::kSection
                  : o == "thin"  ? MarkedWeightedSet::Origin::kThin
                                 : MarkedWeightedSet::Origin::kUser;
    }
    C.items.push_back(std::move(it));
  }
  return C;
}

}  // namespace covlab
