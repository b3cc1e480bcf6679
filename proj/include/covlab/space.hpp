#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "covlab/bitvec.hpp"

namespace covlab {

// Truncated product space of depth d: coordinate n ranges over {1,...,2^n}.
// Atom indexing is mixed-radix little-endian in rank order: the rank-1
// coordinate is the least significant digit, so a rank-m atom with prefix
// (t1,...,tm) has index sum((t_n - 1) * atom_count(n-1)). Bit i of a
// ClopenSet is the rank-d atom with index i; the rank-d atoms extending a
// rank-m atom a are exactly { a + j * atom_count(m) }.
class SpaceCtx {
 public:
  static constexpr int kDefaultDepthCap = 7;

  explicit SpaceCtx(int depth, int depth_cap = kDefaultDepthCap);

  int depth() const { return depth_; }
  std::uint64_t radix(int rank) const { return std::uint64_t{1} << rank; }
  // Number of rank-m atoms (atom_count(0) == 1).
  std::uint64_t atom_count(int m) const { return atom_counts_[static_cast<std::size_t>(m)]; }
  std::uint64_t point_count() const { return atom_count(depth_); }

 private:
  int depth_;
  std::vector<std::uint64_t> atom_counts_;
};

using SpacePtr = std::shared_ptr<const SpaceCtx>;

SpacePtr make_space(int depth, int depth_cap = SpaceCtx::kDefaultDepthCap);

// A point (z_1, ..., z_d), 1 <= z_n <= 2^n.
struct Point {
  std::vector<std::uint32_t> coords;

  std::string to_string() const;
  static Point parse(const std::string& text);
  friend bool operator==(const Point&, const Point&) = default;
};

// Atom of rank m, addressed by its mixed-radix prefix index.
struct AtomId {
  int rank = 0;
  std::uint64_t index = 0;
  friend bool operator==(const AtomId&, const AtomId&) = default;
};

// Finite sorted set of coordinate ranks.
class CoordSet {
 public:
  CoordSet() = default;
  explicit CoordSet(std::vector<int> ranks);

  const std::vector<int>& ranks() const { return ranks_; }
  std::size_t size() const { return ranks_.size(); }
  bool empty() const { return ranks_.empty(); }
  bool contains(int r) const;
  CoordSet intersect(const CoordSet& o) const;
  CoordSet unite(const CoordSet& o) const;
  int min() const { return ranks_.front(); }
  int max() const { return ranks_.back(); }
  friend bool operator==(const CoordSet&, const CoordSet&) = default;

 private:
  std::vector<int> ranks_;
};

// Exact clopen subset, stored at rank-d atom resolution.
struct ClopenSet {
  SpacePtr ctx;
  Bitvec bits;

  ClopenSet() = default;
  ClopenSet(SpacePtr c, Bitvec b) : ctx(std::move(c)), bits(std::move(b)) {}

  bool empty() const { return bits.none(); }
  bool full() const { return bits.count() == bits.size(); }
  std::size_t atom_cardinality() const { return bits.count(); }

  std::string to_string() const;  // "<depth>:<hex>"
  static ClopenSet parse(const SpacePtr& ctx, const std::string& text);

  friend bool operator==(const ClopenSet& a, const ClopenSet& b) {
    return a.bits == b.bits;
  }
};

ClopenSet empty_set(const SpacePtr& ctx);
ClopenSet full_set(const SpacePtr& ctx);

std::uint64_t point_to_index(const SpaceCtx& ctx, const Point& z);
Point index_to_point(const SpaceCtx& ctx, std::uint64_t index);
// Prefix index of a rank-d (or finer) index at rank m.
inline std::uint64_t prefix_index(const SpaceCtx& ctx, std::uint64_t index, int m) {
  return index % ctx.atom_count(m);
}
AtomId atom_of_point(const SpaceCtx& ctx, const Point& z, int rank);

bool point_in(const ClopenSet& X, const Point& z);

// The cylinder of all points extending atom A.
ClopenSet atom_cylinder(const SpacePtr& ctx, const AtomId& A);

// { z : z_n != tau }.
ClopenSet forbidden_section(const SpacePtr& ctx, int n, std::uint32_t tau);

// Smallest rank-m measurable superset: union of rank-m atoms meeting X.
ClopenSet envelope(const ClopenSet& X, int m);

// True iff membership is invariant under changing coordinates outside J.
bool depends_only_on(const ClopenSet& X, const CoordSet& J);

// Measurability: X determined by the first m coordinates.
bool measurable_at(const ClopenSet& X, int m);
// Least m with X in B_m.
int measurability_rank(const ClopenSet& X);

// pi_A: replace the first rank(A) coordinates of z by A's prefix.
Point atom_translate(const SpaceCtx& ctx, const AtomId& A, const Point& z);

// { z : pi_A(z) in C }; never depends on coordinates of rank <= rank(A).
ClopenSet translate_preimage(const AtomId& A, const ClopenSet& C);

// Largest rank-n measurable subset of A disjoint from X: A \ (X cap A)_n.
ClopenSet max_hole(const AtomId& A, const ClopenSet& X, int n);

namespace detail {
void require_same_ctx(const ClopenSet& a, const ClopenSet& b);
void require_rank(const SpaceCtx& ctx, int rank);
}  // namespace detail

}  // namespace covlab
