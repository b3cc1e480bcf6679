#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covlab/cover.hpp"
#include "covlab/oracle.hpp"
#include "covlab/space.hpp"
#include "covlab/thinness.hpp"

namespace covlab {

// Parameters of the level classes. alpha(k) is a rational exponent; paper
// mode pins alpha(k) = 1/(k+5)^3 while surrogate mode allows any
// alpha(k) <= 1/2 with small N, q, b. weight_scale rescales every class
// weight (certificate thresholds scale along with it).
struct LevelParams {
  enum class Mode { kPaper, kSurrogate };

  std::vector<int> k_range;
  std::map<int, std::pair<std::int64_t, std::int64_t>> alpha;  // k -> num/den
  std::map<int, std::uint64_t> N;
  int q = 1;
  std::uint64_t b = 0;
  Mode mode = Mode::kSurrogate;
  BigRational weight_scale = BigRational(1);

  std::pair<std::int64_t, std::int64_t> alpha_of(int k) const;
  std::uint64_t n_of(int k) const;
  // Weight of a level-k item with card I = c (the class weight law).
  DyadicWeight item_weight(int k, std::size_t c) const;
};

LevelParams paper_alpha_profile(std::vector<int> k_range);

// Informational validator flags: whether the large-parameter growth
// conditions hold (they will not in surrogate mode).
struct LevelParamFlags {
  std::map<int, bool> n_growth_ok;  // N(k) >= 2^(k+6) * (2^(k+5))^(1/alpha(k))
  bool b_matches = false;           // b == 2^(2q+10)
};
LevelParamFlags validate_level_params(const LevelParams& p);

inline constexpr std::size_t kDefaultClassCap = 2000000;

// All section-intersection items of level k: one forbidden value per rank
// of a nonempty I with card I <= N(k), weighted by the class law.
WeightedClass make_section_class(const SpacePtr& ctx, const LevelParams& p, int k,
                                 std::size_t size_cap = kDefaultClassCap);

// Union of the level classes over k_range, dominance-pruned.
WeightedClass make_base_class(const SpacePtr& ctx, const LevelParams& p,
                              std::size_t size_cap = kDefaultClassCap);

// Projection of a section item onto the ranks of J: the sections outside J
// are dropped, giving a superset that depends only on J, reweighted by the
// class law at card(I intersect J).
MarkedWeightedSet project_item(const SpacePtr& ctx, const MarkedWeightedSet& item,
                               const CoordSet& J, const LevelParams& p);

// Greedy distinct-representative certificate: a point z with
// z_{i_r} = tau_r(i_r) for all r lies outside every set of F.
struct Transversal {
  bool success = false;
  Point point;
  std::vector<std::pair<std::size_t, int>> picks;  // item index -> chosen rank
  std::string refusal;
};
Transversal transversal_certificate(const SpacePtr& ctx, const WeightedClass& F,
                                    const DyadicWeight& weight_budget);

// prod_{n<=N} (1 - 2^-n): the average over all section assignments of the
// membership indicator, which is point-independent.
BigRational pathology_average(int N);
// Lower bound for the infinite product via the tail estimate
// prod_{n>N0}(1-2^-n) >= 1 - 2^-N0.
BigRational pathology_average_limit_lower(int N0);

// Window selection by the counting argument: picks one interval per chain
// minimizing the weight of items at least half-concentrated in the union.
struct WindowSelection {
  std::vector<int> u;                                // 1-based, u[l] in U_l
  std::vector<std::pair<int, int>> windows;          // half-open (m_l, n_l]
  DyadicWeight covered_weight;                       // S(u)
  BigRational selection_bound;                       // 2 w(F2) / min |U_l|
  std::size_t min_choices = 0;                       // min |U_l|
  std::vector<std::size_t> f3, f4;                   // indices into F2
  std::vector<std::vector<std::size_t>> f3_per_window;
  CoordSet window_ranks;                             // union of the windows
};
WindowSelection select_windows(const std::vector<CoordSet>& chains, const WeightedClass& F2,
                               const CoordSet& forbidden,
                               const BigRational& per_window_fraction);

// Closed-form average of card(I intersect W(u)) over the allowed u, by
// per-interval linearity. The enumeration oracle in the tests must agree.
BigRational average_window_overlap(const CoordSet& I, const std::vector<CoordSet>& chains,
                                   const CoordSet& forbidden);

// Splits the final cover into rank tiers, projects each tier into its
// window, and cuts the tier sequence so the tail weighs at most alpha.
struct WindowSplitResult {
  ClopenSet C;
  int r0 = 0;                   // tiers up to r0 form C
  std::size_t stable_from = 0;  // first cover index whose tier tuple is final
  std::map<int, WeightedClass> tiers;
  std::map<int, DyadicWeight> tier_weights;
  DyadicWeight c_weight_bound;  // sum of kept tier weights (<= 2 * threshold)
  struct Residual {
    std::size_t i = 0;
    DyadicWeight bound;
    bool evaluated = false;
    bool verified = false;
  };
  std::vector<Residual> residuals;
};
WindowSplitResult window_split_cover(const std::vector<ClopenSet>& E,
                                     const std::vector<WeightedClass>& covers, int m,
                                     const DyadicWeight& alpha, const DyadicWeight& threshold,
                                     const LevelParams& params, const MuOracle* verify_mu);

// Certificate thresholds. hole drives the case split (a preimage at or
// above it counts as heavy) and caps witness-cover weights; thin is the
// level demanded of hole preimages in thinness checks. Soundness of the
// derived claims needs mu(T) >= 2*hole + thin, with strict slack for the
// window-split inclusion argument.
struct CertThresholds {
  DyadicWeight hole;
  DyadicWeight thin;
};

// Per-atom hole extraction: either an initial union already fills the atom
// measurably (case 1) or the window-split cover bounds the residuals
// (case 2). Produces a thin subset of B with small leftovers.
struct HoleExtractResult {
  int n = 0;
  ClopenSet carved;  // B'
  struct AtomOutcome {
    AtomId atom;
    int case_id = 0;        // 1 or 2
    std::size_t case1_p = 0;
    DyadicWeight residual_alpha;  // per-atom residual target (case 2)
  };
  std::vector<AtomOutcome> atoms;
  std::size_t tail_start = 0;            // indices past every case-1 cut
  std::vector<DyadicWeight> tail_bounds;  // per i >= tail_start claims
  bool thin_checked = false;
  bool thin_ok = false;
};
HoleExtractResult hole_extract(const ClopenSet& B, int m, const std::vector<ClopenSet>& E,
                               const MuOracle& mu, const DyadicWeight& alpha,
                               const CertThresholds& thr, const LevelParams& params,
                               bool verify);

// Recursive chain of hole extractions: T = B_0 over B_1 over ... with
// residual bounds per step; the final set qualifies for the thin class
// when enough ranks were found.
struct ChainStep {
  int n = 0;
  ClopenSet B;
  std::vector<DyadicWeight> step_bounds;  // per i, bound on mu((E_i cap B_prev) minus B)
  bool thin_ok = false;
};
struct ChainReport {
  std::vector<ChainStep> steps;
  CoordSet ranks;      // {1, n_1, ..., n_l}
  bool rank_exhausted = false;
  bool qualifies = false;               // card(ranks) reached b, thinness verified
  std::optional<MarkedWeightedSet> thin_item;  // (B_last, ranks, 2^-q)
  std::vector<DyadicWeight> tail_bounds;       // per i, telescoped bound
};
ChainReport exhaustivity_chain(const std::vector<ClopenSet>& E, const MuOracle& mu,
                               std::uint64_t b, const DyadicWeight& alpha,
                               const CertThresholds& thr, const LevelParams& params,
                               bool verify);

}  // namespace covlab
