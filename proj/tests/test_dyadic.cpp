#include "covlab/dyadic.hpp"

#include "doctest.h"

using namespace covlab;

TEST_CASE("dyadic arithmetic is exact") {
  const DyadicWeight one = DyadicWeight::from_int(1);
  const DyadicWeight half = DyadicWeight::from_pow2(1, -1);
  const DyadicWeight quarter = DyadicWeight::from_pow2(1, -2);
  CHECK(half + half == one);
  CHECK(quarter * 4 == one);
  CHECK(one - half == half);
  CHECK(half < one);
  CHECK(half.mul_pow2(1) == one);
  CHECK(one.mul_pow2(-2) == quarter);
  CHECK_THROWS(half - one);
  CHECK(DyadicWeight::from_pow2(1, -48).numerator() == 1);
  CHECK_THROWS(DyadicWeight::from_pow2(1, -49));
}

TEST_CASE("decimal io round trips") {
  for (auto v : {DyadicWeight::from_int(0), DyadicWeight::from_int(5),
                 DyadicWeight::from_pow2(3, -2), DyadicWeight::from_pow2(1, -48),
                 DyadicWeight::from_pow2(12345, -17)}) {
    CHECK(DyadicWeight::parse(v.to_decimal()) == v);
  }
  CHECK(DyadicWeight::from_pow2(3, -2).to_decimal() == "0.75");
  CHECK(DyadicWeight::from_int(2).to_decimal() == "2");
}

TEST_CASE("rational rounding is nearest, ties to even") {
  // 1/3 * 2^48 = 93824992236885.33..., rounds down
  CHECK(DyadicWeight::round_rational(BigRational(1, 3)).numerator() ==
        BigInt("93824992236885"));
  // exact dyadics pass through
  CHECK(DyadicWeight::round_rational(BigRational(3, 4)) == DyadicWeight::from_pow2(3, -2));
  // ties: (2k+1)/2^49 sits halfway between k/2^48 and (k+1)/2^48
  const BigInt two49 = BigInt(1) << 49;
  CHECK(DyadicWeight::round_rational(BigRational(5, two49)).numerator() == 2);
  CHECK(DyadicWeight::round_rational(BigRational(7, two49)).numerator() == 4);
}

TEST_CASE("pow_weight matches hand values") {
  // (4/1)^(1/2) * 2^-1 = 1
  CHECK(pow_weight(BigRational(1), 1, 4, 1, 1, 2) == DyadicWeight::from_int(1));
  // (1/1)^anything * 2^-k = 2^-k
  CHECK(pow_weight(BigRational(1), 3, 7, 7, 1, 9) == DyadicWeight::from_pow2(1, -3));
  // scale factors multiply through
  CHECK(pow_weight(BigRational(3), 0, 1, 1, 0, 1) == DyadicWeight::from_int(3));
  // (8)^(1/3) = 2
  CHECK(pow_weight(BigRational(1), 0, 8, 1, 1, 3) == DyadicWeight::from_int(2));
}

TEST_CASE("extended weights order with infinity on top") {
  const ExtWeight inf = ExtWeight::inf();
  const ExtWeight two = ExtWeight::of(DyadicWeight::from_int(2));
  CHECK(two < inf);
  CHECK_FALSE(inf < inf);
  CHECK((two + inf).infinite);
  CHECK(inf.at_least(DyadicWeight::from_int(1000)));
  CHECK(two.at_least(DyadicWeight::from_int(2)));
  CHECK_FALSE(two.at_least(DyadicWeight::from_int(3)));
}

TEST_CASE("pow2_upper dominates and stays close") {
  const BigRational b = pow2_upper(1, 2);  // 2^(2*1/2) = 2
  CHECK(b >= 2);
  CHECK(b < BigRational(2) + BigRational(1, BigInt(1) << 32));
}
