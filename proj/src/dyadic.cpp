#include "covlab/dyadic.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace covlab {

namespace {
using BigFloat = boost::multiprecision::cpp_bin_float_100;

DyadicWeight round_bigfloat(const BigFloat& x) {
  if (x < 0) throw std::invalid_argument("negative weight");
  const BigFloat scaled = x * BigFloat(BigInt(1) << DyadicWeight::kFracBits);
  BigInt lo = static_cast<BigInt>(boost::multiprecision::floor(scaled));
  const BigFloat frac = scaled - BigFloat(lo);
  // The computation carries ~100 decimal digits, so a window this tight only
  // fires on genuine half-integer ties.
  const BigFloat half_dist = boost::multiprecision::abs(frac - BigFloat(0.5));
  if (half_dist < BigFloat("1e-60")) {
    if (boost::multiprecision::bit_test(lo, 0)) ++lo;  // ties to even
  } else if (frac > BigFloat(0.5)) {
    ++lo;
  }
  return DyadicWeight(lo);
}
}  // namespace

DyadicWeight DyadicWeight::from_pow2(std::int64_t mantissa, int exp2) {
  if (exp2 + kFracBits < 0) throw std::invalid_argument("exponent below the dyadic grid");
  return DyadicWeight(BigInt(mantissa) << (exp2 + kFracBits));
}

DyadicWeight DyadicWeight::round_rational(const BigRational& x) {
  if (x < 0) throw std::invalid_argument("negative weight");
  const BigInt num = boost::multiprecision::numerator(x) << kFracBits;
  const BigInt den = boost::multiprecision::denominator(x);
  BigInt q = num / den;
  const BigInt r2 = (num - q * den) * 2;
  if (r2 > den || (r2 == den && boost::multiprecision::bit_test(q, 0))) ++q;
  return DyadicWeight(q);
}

DyadicWeight DyadicWeight::parse(const std::string& decimal) {
  const auto dot = decimal.find('.');
  const std::string ip = dot == std::string::npos ? decimal : decimal.substr(0, dot);
  const std::string fp = dot == std::string::npos ? "" : decimal.substr(dot + 1);
  if (ip.empty() && fp.empty()) throw std::invalid_argument("empty weight literal");
  BigInt scaled = 0;
  for (char c : ip + fp) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad weight literal: " + decimal);
    scaled = scaled * 10 + (c - '0');
  }
  BigInt den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  return round_rational(BigRational(scaled, den));
}

std::string DyadicWeight::to_decimal() const {
  // num / 2^48 == num * 5^48 / 10^48, which is exact in decimal.
  BigInt five48 = 1;
  for (int i = 0; i < kFracBits; ++i) five48 *= 5;
  BigInt scaled = num_ * five48;
  BigInt ip = scaled / boost::multiprecision::pow(BigInt(10), kFracBits);
  BigInt fpart = scaled % boost::multiprecision::pow(BigInt(10), kFracBits);
  std::string frac = fpart.str();
  frac.insert(frac.begin(), static_cast<std::size_t>(kFracBits) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = ip.str();
  if (!frac.empty()) out += "." + frac;
  return out;
}

DyadicWeight pow_weight(const BigRational& scale, int k, std::uint64_t num, std::uint64_t den,
                        std::int64_t alpha_num, std::int64_t alpha_den) {
  if (num == 0 || den == 0) throw std::invalid_argument("pow_weight base must be positive");
  const BigFloat base = BigFloat(num) / BigFloat(den);
  const BigFloat expo = BigFloat(alpha_num) / BigFloat(alpha_den);
  BigFloat v = boost::multiprecision::pow(base, expo);
  v *= BigFloat(scale);
  if (k >= 0)
    v /= BigFloat(BigInt(1) << k);
  else
    v *= BigFloat(BigInt(1) << (-k));
  return round_bigfloat(v);
}

BigRational pow2_upper(std::int64_t alpha_num, std::int64_t alpha_den) {
  const BigFloat v = boost::multiprecision::pow(
      BigFloat(2), BigFloat(2) * BigFloat(alpha_num) / BigFloat(alpha_den));
  // Round up on the 2^-64 grid.
  const BigInt grid = static_cast<BigInt>(boost::multiprecision::ceil(
      v * BigFloat(BigInt(1) << 64) + BigFloat(1)));
  return BigRational(grid, BigInt(1) << 64);
}

DyadicWeight mul_exp2_floor(const DyadicWeight& w, std::int64_t alpha_num,
                            std::int64_t alpha_den) {
  const BigFloat v = BigFloat(w.to_rational()) *
                     boost::multiprecision::pow(
                         BigFloat(2), BigFloat(2) * BigFloat(alpha_num) / BigFloat(alpha_den));
  const BigFloat scaled = v * BigFloat(BigInt(1) << DyadicWeight::kFracBits);
  return DyadicWeight(static_cast<BigInt>(boost::multiprecision::floor(scaled)));
}

std::string rational_to_string(const BigRational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

}  // namespace covlab
