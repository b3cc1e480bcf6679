#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace covlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Nonnegative dyadic fixed-point weight: numerator / 2^48, exact arithmetic.
class DyadicWeight {
 public:
  static constexpr int kFracBits = 48;

  DyadicWeight() = default;
  explicit DyadicWeight(const BigInt& numerator) : num_(numerator) {
    if (num_ < 0) throw std::invalid_argument("weight must be nonnegative");
  }

  static DyadicWeight from_int(std::int64_t v) {
    return DyadicWeight(BigInt(v) << kFracBits);
  }
  // value = mantissa * 2^exp2 (must be representable, i.e. exp2 >= -48).
  static DyadicWeight from_pow2(std::int64_t mantissa, int exp2);
  // Nearest dyadic, ties to even.
  static DyadicWeight round_rational(const BigRational& x);
  static DyadicWeight parse(const std::string& decimal);

  const BigInt& numerator() const { return num_; }
  bool is_zero() const { return num_ == 0; }
  BigRational to_rational() const {
    return BigRational(num_, BigInt(1) << kFracBits);
  }
  double to_double() const { return static_cast<double>(to_rational()); }
  std::string to_decimal() const;

  friend DyadicWeight operator+(const DyadicWeight& a, const DyadicWeight& b) {
    return DyadicWeight(a.num_ + b.num_);
  }
  friend DyadicWeight operator-(const DyadicWeight& a, const DyadicWeight& b) {
    if (a.num_ < b.num_) throw std::invalid_argument("weight subtraction underflow");
    return DyadicWeight(a.num_ - b.num_);
  }
  DyadicWeight& operator+=(const DyadicWeight& o) {
    num_ += o.num_;
    return *this;
  }
  friend DyadicWeight operator*(const DyadicWeight& a, std::int64_t k) {
    return DyadicWeight(a.num_ * k);
  }
  DyadicWeight mul_pow2(int e) const {
    if (e >= 0) return DyadicWeight(num_ << e);
    return div_pow2_floor(-e);
  }
  // Floor division by 2^e (exact when the low bits are zero).
  DyadicWeight div_pow2_floor(int e) const { return DyadicWeight(num_ >> e); }

  friend auto operator<=>(const DyadicWeight& a, const DyadicWeight& b) {
    return a.num_.compare(b.num_) <=> 0;
  }
  friend bool operator==(const DyadicWeight& a, const DyadicWeight& b) {
    return a.num_ == b.num_;
  }

 private:
  BigInt num_;
};

// Weight extended with +infinity (an uncoverable set has no finite value).
struct ExtWeight {
  bool infinite = false;
  DyadicWeight value;

  static ExtWeight inf() { return ExtWeight{true, DyadicWeight()}; }
  static ExtWeight of(DyadicWeight w) { return ExtWeight{false, std::move(w)}; }

  friend ExtWeight operator+(const ExtWeight& a, const ExtWeight& b) {
    if (a.infinite || b.infinite) return inf();
    return of(a.value + b.value);
  }
  friend bool operator<(const ExtWeight& a, const ExtWeight& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
  }
  friend bool operator<=(const ExtWeight& a, const ExtWeight& b) { return !(b < a); }
  bool at_least(const DyadicWeight& t) const { return infinite || value >= t; }
};

// round(scale * 2^(-k) * (num/den)^(alpha_num/alpha_den)) to the 48-bit grid,
// nearest, ties to even. Exponent base num/den must be positive.
DyadicWeight pow_weight(const BigRational& scale, int k, std::uint64_t num, std::uint64_t den,
                        std::int64_t alpha_num, std::int64_t alpha_den);

// Upper bound on 2^(2*alpha) as a rational with margin below 2^-60.
BigRational pow2_upper(std::int64_t alpha_num, std::int64_t alpha_den);

// floor(w * 2^(2*alpha)) on the dyadic grid.
DyadicWeight mul_exp2_floor(const DyadicWeight& w, std::int64_t alpha_num,
                            std::int64_t alpha_den);

std::string rational_to_string(const BigRational& r);

}  // namespace covlab
