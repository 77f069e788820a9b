#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "dpw/common.hpp"

namespace dpw {

using BigInt = boost::multiprecision::cpp_int;

/// Exact dyadic rational: num / 2^exp with exp >= 0, kept normalized (odd
/// numerator unless zero). All probabilities in the vertex-edge model are of
/// this form, so sums and products stay exact and comparisons against
/// arbitrary fractions reduce to integer cross-multiplication.
class Dyadic {
 public:
  Dyadic() : num_(0), exp_(0) {}
  Dyadic(BigInt num, int exp) : num_(std::move(num)), exp_(exp) {
    if (exp_ < 0) {
      num_ <<= -exp_;
      exp_ = 0;
    }
    normalize();
  }

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() { return Dyadic(1, 0); }
  /// 2^(-k) for k >= 0.
  static Dyadic pow2_neg(int k) {
    if (k < 0) throw invalid_argument("Dyadic::pow2_neg: negative exponent");
    return Dyadic(1, k);
  }

  const BigInt& numerator() const { return num_; }
  int log2_denominator() const { return exp_; }
  bool is_zero() const { return num_ == 0; }

  Dyadic operator+(const Dyadic& o) const {
    int e = std::max(exp_, o.exp_);
    BigInt a = num_ << (e - exp_);
    BigInt b = o.num_ << (e - o.exp_);
    return Dyadic(a + b, e);
  }

  Dyadic operator-(const Dyadic& o) const {
    int e = std::max(exp_, o.exp_);
    BigInt a = num_ << (e - exp_);
    BigInt b = o.num_ << (e - o.exp_);
    return Dyadic(a - b, e);
  }

  Dyadic operator*(const Dyadic& o) const { return Dyadic(num_ * o.num_, exp_ + o.exp_); }

  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }

  bool operator==(const Dyadic& o) const { return num_ == o.num_ && exp_ == o.exp_; }
  bool operator<(const Dyadic& o) const {
    int e = std::max(exp_, o.exp_);
    return (num_ << (e - exp_)) < (o.num_ << (e - o.exp_));
  }
  bool operator<=(const Dyadic& o) const { return *this == o || *this < o; }

  /// this <= p/q for q > 0.
  bool leq_fraction(const BigInt& p, const BigInt& q) const {
    if (q <= 0) throw invalid_argument("Dyadic::leq_fraction: denominator must be positive");
    return num_ * q <= p * (BigInt(1) << exp_);
  }

  std::string to_string() const {
    return num_.str() + "/2^" + std::to_string(exp_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && (num_ & 1) == 0) {
      num_ >>= 1;
      --exp_;
    }
  }

  BigInt num_;
  int exp_;
};

inline BigInt bigint_pow(BigInt base, int e) {
  BigInt out = 1;
  while (e-- > 0) out *= base;
  return out;
}

inline nlohmann::json to_json(const Dyadic& d) {
  return {{"numerator", d.numerator().str()}, {"log2_denominator", d.log2_denominator()}};
}

}  // namespace dpw
