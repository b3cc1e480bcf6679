#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "covlab/oracle.hpp"
#include "covlab/space.hpp"

namespace covlab {

// Every rank-m atom contains a rank-n atom disjoint from X.
bool is_mn_thin(const ClopenSet& X, int m, int n);

// Thin for every pair of ranks in I; consecutive pairs suffice because
// (m,n)-thin implies (m,n')-thin for n' >= n.
bool is_thin_over(const ClopenSet& X, const CoordSet& I);

// Every rank-m atom A holds a rank-n measurable hole whose translate
// preimage has oracle value >= threshold. The maximal hole decides this:
// the oracle is monotone, so any other hole gives a smaller value.
bool is_mn_thin_under(const ClopenSet& X, int m, int n, const MuOracle& mu,
                      const DyadicWeight& threshold);
bool is_thin_over_under(const ClopenSet& X, const CoordSet& I, const MuOracle& mu,
                        const DyadicWeight& threshold);

// Relabels the families and picks blocks J_l of size t, one per family,
// with max J_l <= min J_{l+1}. Uses disjoint blocks when every family has
// at least s*t elements, overlapping blocks down to s*(t-1)+1.
struct ChainSelection {
  std::vector<std::size_t> order;  // order[l] = original index at position l
  std::vector<CoordSet> blocks;    // J_l, each of size t
};
ChainSelection chain_select(const std::vector<CoordSet>& families, int t);

// One avoidance constraint: a set together with its precomputed rank
// triple (m, n, r) from the family's coordinate set.
struct WalkConstraint {
  ClopenSet X;
  std::array<int, 3> ranks;  // m < n < r
};

struct WalkStep {
  AtomId atom;      // where thinness was applied
  ClopenSet hole;   // chosen atom disjoint from the constraint set
  int chance = 1;   // 1 = (m,n) pair, 2 = (n,r) pair
};

struct WalkTrace {
  std::vector<WalkStep> steps;
  Point final_point;
};

// Builds a point with z_n = tau avoiding every constraint set, walking
// through atom refinements with two chances per constraint. Throws
// CertificateError when a required hole is missing (a thinness
// precondition was violated upstream).
std::pair<Point, WalkTrace> avoidance_walk(const SpacePtr& ctx,
                                           const std::vector<WalkConstraint>& family, int n,
                                           std::uint32_t tau);

// Extracts a subsequence of pairwise disjoint sets whose envelopes
// stabilize rank by rank, then verifies the induced thinness claims.
struct StabilizeResult {
  std::vector<std::size_t> chosen;  // indices into the input, in order
  std::vector<int> ranks;           // m(i): chosen[i] is rank-m(i) measurable
  struct Claim {
    std::size_t member;  // index into `chosen`
    int m_lo = 0;
    int m_hi = 0;
    bool verified = false;
  };
  std::vector<Claim> claims;
  bool all_verified() const {
    for (const auto& c : claims)
      if (!c.verified) return false;
    return true;
  }
};
StabilizeResult stabilize_envelopes(const std::vector<ClopenSet>& sets);

}  // namespace covlab
