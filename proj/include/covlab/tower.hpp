#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "covlab/levels.hpp"

namespace covlab {

// Parameters of the recursive tower over the base classes. Level budgets
// follow c_{k+1} = c_k * 2^(2 alpha(k)), rounded down on the dyadic grid.
struct TowerParams {
  int p = 2;
  std::map<int, std::uint64_t> M;
  DyadicWeight c1 = DyadicWeight::from_int(16);
  CertThresholds thresholds;
  BigRational window_fraction = BigRational(1, 4);  // per-window pigeonhole
  int t_select = 0;                                 // chain block size, 0 = auto

  std::uint64_t m_of(int k) const;
  DyadicWeight budget(int k, const LevelParams& lp) const;  // c_k
  // Weight law of the level-k thin class: scale * 2^-k * (M(k)/card)^alpha(k).
  DyadicWeight thin_item_weight(int k, std::size_t card, const LevelParams& lp) const;
};

// Growth-condition flags (informational; false at surrogate scale).
struct TowerParamFlags {
  std::map<int, bool> m_growth_ok;
  std::map<int, bool> c_below_32;
};
TowerParamFlags validate_tower_params(const TowerParams& tp, const LevelParams& lp);

// Rigorous bound on the budget recursion with the paper exponents
// alpha(k) = 1/(k+5)^3: fixed-point interval sums plus a tail estimate.
struct BudgetBoundReport {
  int k_max = 0;
  bool all_below_32 = false;
  BigRational partial_exponent_hi;  // upper bound on 2*sum alpha up to k_max
  BigRational limit_upper;          // upper bound on sup_k c_k, tail included
};
BudgetBoundReport verify_budget_bound(int k_max);

// Explicit tower context: the base class plus per-level thin candidates.
// Evaluations are exact over these explicit classes and upper bounds for
// the ideal tower values (the implicit classes are supersets).
class TowerContext {
 public:
  TowerContext(SpacePtr ctx, LevelParams lp, TowerParams tp, WeightedClass base,
               std::map<int, WeightedClass> thin_candidates,
               std::uint64_t oracle_budget = kDefaultNodeBudget);

  const SpacePtr& space() const { return ctx_; }
  const LevelParams& level_params() const { return lp_; }
  const TowerParams& tower_params() const { return tp_; }
  const WeightedClass& base_class() const { return base_; }
  const std::map<int, WeightedClass>& thin_candidates() const { return thin_; }

  const WeightedClass& explicit_class(int k) const;
  const ClassOracle& oracle(int k) const;
  MuOracle mu(int k) const { return oracle(k).as_mu(); }

  struct FlaggedEval {
    CoverResult cover;
    bool exact_over_explicit = false;
    bool upper_bound_for_ideal = true;
  };
  FlaggedEval eval(int k, const ClopenSet& B) const;

 private:
  SpacePtr ctx_;
  LevelParams lp_;
  TowerParams tp_;
  WeightedClass base_;
  std::map<int, WeightedClass> thin_;
  std::uint64_t budget_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<WeightedClass>> classes_;
  mutable std::map<int, std::unique_ptr<ClassOracle>> oracles_;
};

// Membership test for the level-k thin class: (I, next-level)-thin with
// card I <= M(k); returns the class weight alongside.
std::pair<bool, DyadicWeight> thin_member(const TowerContext& tc, const ClopenSet& X,
                                          const CoordSet& I, int k);

// Interval pullback of a thin item through an atom of rank m0: the
// rank-n0 envelope of the translate preimage, marked by I cut to the
// interval, reweighted by the ratio law.
MarkedWeightedSet interval_pullback(const TowerContext& tc, const MarkedWeightedSet& item,
                                    int m0, int n0, const AtomId& A, bool verify = false,
                                    bool* thin_ok = nullptr);

// Finds a rank-n_l atom inside A avoiding both the thin set and the
// per-window class, by pulling the class into the window and carving the
// thinness hole. Throws CertificateError with the offending weights when
// no atom remains.
struct AtomAvoidOutcome {
  AtomId chosen;
  DyadicWeight pullback_weight;
  DyadicWeight class_weight;  // weight of the window class before pullback
};
AtomAvoidOutcome atom_avoid(const TowerContext& tc, const AtomId& A, const ClopenSet& thin_set,
                            const WeightedClass& window_class, int m_l, int n_l, int q);

// Coordinate rewrite map: inside each window the prefix is rerouted into
// the chosen avoiding atom; outside the windows coordinates pass through.
// The first j output coordinates depend only on the first j inputs.
class WindowMap {
 public:
  static WindowMap build(const SpacePtr& ctx, const std::vector<std::pair<int, int>>& windows,
                         const std::vector<std::map<std::uint64_t, std::uint64_t>>& choices);
  static WindowMap identity(const SpacePtr& ctx);

  Point apply(const Point& y) const;
  ClopenSet preimage(const ClopenSet& X) const;
  ClopenSet image_of_space() const;
  const std::vector<std::pair<int, int>>& windows() const { return windows_; }
  CoordSet window_ranks() const;

 private:
  SpacePtr ctx_;
  std::vector<std::pair<int, int>> windows_;
  std::vector<std::uint32_t> table_;  // output index per input index
};

// Pullback of one family item through the window map, classified as the
// untouched case, the coordinate projection case, or the thin-set
// preimage case.
struct PullbackOutcome {
  MarkedWeightedSet item;
  int case_id = 0;
  bool superset_ok = false;  // output contains the map preimage
  bool weight_ok = false;    // weight ratio within 2^(2 alpha(q)) + slack
  bool thin_ok = true;       // case-3 thinness transfer, when verified
};
PullbackOutcome window_pullback(const TowerContext& tc, const MarkedWeightedSet& item,
                                const WindowMap& xi, const WindowSelection& sel, int q,
                                bool verify = false);

// One recorded inequality of a certificate stage.
struct StageCheck {
  std::string stage;
  std::string name;
  std::string lhs;
  std::string rhs;
  bool ok = false;
};

// Avoidance certificate at level q: a point outside the union of the
// family, produced by the window pipeline and recursion to the base.
struct CertificateReport {
  bool success = false;
  Point point;
  int q = 0;
  std::string failed_stage;
  std::string detail;
  std::vector<StageCheck> checks;
  int t = 0;
  std::vector<int> selected_u;
  std::vector<std::pair<int, int>> windows;
  std::size_t f1_count = 0, f2_count = 0, f3_count = 0, f4_count = 0;
  DyadicWeight family_weight, f3_weight, pullback_weight;
  std::string base_route;  // "transversal" or "complement-scan" at q = p
  std::vector<CertificateReport> inner;
};

CertificateReport level_certificate(const TowerContext& tc, const WeightedClass& F, int q);

}  // namespace covlab
