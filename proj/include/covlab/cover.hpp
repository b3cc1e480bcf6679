#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covlab/dyadic.hpp"
#include "covlab/space.hpp"

namespace covlab {

// A set marked with its distinguished coordinate ranks and a weight.
struct MarkedWeightedSet {
  ClopenSet X;
  CoordSet I;
  DyadicWeight w;

  // Provenance kept by generators so items can be projected and classified.
  enum class Origin { kSection, kThin, kUser };
  Origin origin = Origin::kUser;
  int level = -1;                         // class level k, -1 if none
  std::map<int, std::uint32_t> sections;  // rank -> forbidden value, for section items
};

struct WeightedClass {
  SpacePtr ctx;
  std::string label;
  std::vector<MarkedWeightedSet> items;

  DyadicWeight total_weight() const;
  ClopenSet union_of() const;
};

// Outcome of a min-weight cover search. When coverable is false the target
// is not contained in the union of the class and both bounds read 0.
struct CoverResult {
  DyadicWeight lower;
  DyadicWeight upper;
  std::vector<std::size_t> witness;
  bool optimal = false;
  bool coverable = false;
  std::uint64_t nodes = 0;

  ExtWeight value() const {
    return coverable ? ExtWeight::of(upper) : ExtWeight::inf();
  }
  ExtWeight lower_value() const {
    return coverable ? ExtWeight::of(lower) : ExtWeight::inf();
  }
};

inline constexpr std::uint64_t kDefaultNodeBudget = 200000;

// Precomputed item orderings shared by every search over one class.
struct ClassIndex {
  std::vector<std::size_t> by_weight;   // ascending (weight, index)
  std::vector<std::size_t> by_density;  // ascending weight / |X|
  std::vector<DyadicWeight> density;    // floor(w_i / |X_i|) on the grid
};
ClassIndex build_class_index(const WeightedClass& C);

// Exact min-weight cover of B by subfamilies of C (best-first branch and
// bound; greedy incumbent; admissible bound from per-atom cheapest items
// and a fractional counting relaxation). Within budget the result is
// optimal; otherwise a sound [lower, upper] interval with a witness for
// the upper bound.
CoverResult min_cover(const WeightedClass& C, const ClopenSet& B,
                      std::uint64_t node_budget = kDefaultNodeBudget,
                      const ClassIndex* index = nullptr);

// Decides value >= threshold, stopping as soon as either side is proved.
// nullopt when the budget ran out undecided.
std::optional<bool> min_cover_at_least(const WeightedClass& C, const ClopenSet& B,
                                       const DyadicWeight& threshold,
                                       std::uint64_t node_budget = kDefaultNodeBudget,
                                       const ClassIndex* index = nullptr);

// min(1, cover value) for a class whose weights all equal the dyadic
// rounding of 1/(q+1); an uncoverable B yields 1.
DyadicWeight capped_min_cover(const WeightedClass& C, const ClopenSet& B, int q,
                              std::uint64_t node_budget = kDefaultNodeBudget);

using SubmeasureFn = std::function<ExtWeight(const ClopenSet&)>;

struct AxiomViolation {
  std::string law;  // "empty", "monotone", "subadditive"
  std::size_t pair_index = 0;
  std::string detail;
};

struct AxiomReport {
  std::size_t pairs_checked = 0;
  std::vector<AxiomViolation> violations;
  bool passed() const { return violations.empty(); }
};

AxiomReport check_submeasure_axioms(const SubmeasureFn& nu, const SpacePtr& ctx,
                                    const std::vector<std::pair<ClopenSet, ClopenSet>>& samples);

// Drops items dominated by another item with a larger-or-equal set and
// smaller-or-equal weight; cover values are unchanged.
WeightedClass dominance_prune(const WeightedClass& C);

void write_class_jsonl(std::ostream& os, const WeightedClass& C);
WeightedClass read_class_jsonl(std::istream& is, const SpacePtr& ctx, std::string label);

}  // namespace covlab
