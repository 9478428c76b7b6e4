#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "jetlag/errors.hpp"

namespace jetlag {

/// Exact rational number on 64-bit words. Denominator is always positive and
/// the fraction is kept reduced; any overflow of the underlying words throws
/// instead of wrapping, so symbolic results are never silently wrong.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) { assign(n, d); }

  long long num() const noexcept { return num_; }
  long long den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_one() const noexcept { return num_ == 1 && den_ == 1; }
  bool is_integer() const noexcept { return den_ == 1; }
  bool is_negative() const noexcept { return num_ < 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ExprError("expr: rational division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return from128(-i128(num_), den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  /// Integer power; negative exponents invert (zero base throws).
  Rational pow(int e) const {
    if (e == 0) return Rational(1);
    Rational base = *this;
    if (e < 0) {
      if (num_ == 0) throw ExprError("expr: zero raised to a negative power");
      base = Rational(1) / base;
      e = -e;
    }
    Rational acc(1);
    while (e > 0) {
      if (e & 1) acc *= base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return acc;
  }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) noexcept {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) noexcept {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }

  int cmp(const Rational& o) const noexcept {
    if (*this < o) return -1;
    if (o < *this) return 1;
    return 0;
  }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  void assign(long long n, long long d) {
    if (d == 0) throw ExprError("expr: rational with zero denominator");
    *this = from128(n, d);
  }

  static Rational from128(i128 n, i128 d) {
    if (d == 0) throw ExprError("expr: rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw ExprError("expr: rational overflow (coefficient exceeds 64 bits)");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) noexcept {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace jetlag
