#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

namespace synphy {

namespace detail {

/// Limb storage with inline capacity for four 32-bit limbs (values up to
/// 2^128), spilling to the heap beyond that. Keeps small-number arithmetic
/// allocation-free, which dominates the exact kernels.
class LimbVec {
 public:
  LimbVec() = default;
  LimbVec(std::size_t n, std::uint32_t fill) { resize(n, fill); }
  LimbVec(const LimbVec& o) { assign_from(o); }
  LimbVec& operator=(const LimbVec& o) {
    if (this != &o) {
      release();
      assign_from(o);
    }
    return *this;
  }
  LimbVec(LimbVec&& o) noexcept { steal(o); }
  LimbVec& operator=(LimbVec&& o) noexcept {
    if (this != &o) {
      release();
      steal(o);
    }
    return *this;
  }
  ~LimbVec() { release(); }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::uint32_t operator[](std::size_t i) const { return data_[i]; }
  std::uint32_t& operator[](std::size_t i) { return data_[i]; }
  std::uint32_t back() const { return data_[size_ - 1]; }
  void pop_back() { --size_; }
  void clear() { size_ = 0; }

  void push_back(std::uint32_t v) {
    if (size_ == cap_) grow(size_ + 1);
    data_[size_++] = v;
  }
  void resize(std::size_t n, std::uint32_t fill = 0) {
    if (n > cap_) grow(n);
    for (std::size_t i = size_; i < n; ++i) data_[i] = fill;
    size_ = n;
  }
  void assign(std::size_t n, std::uint32_t fill) {
    size_ = 0;
    resize(n, fill);
  }
  void reserve(std::size_t n) {
    if (n > cap_) grow(n);
  }

  friend bool operator==(const LimbVec& a, const LimbVec& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (a.data_[i] != b.data_[i]) return false;
    return true;
  }

 private:
  static constexpr std::size_t kInline = 4;
  std::uint32_t inline_[kInline];
  std::uint32_t* data_ = inline_;
  std::size_t size_ = 0;
  std::size_t cap_ = kInline;

  bool on_heap() const { return data_ != inline_; }

  void release() {
    if (on_heap()) delete[] data_;
    data_ = inline_;
    size_ = 0;
    cap_ = kInline;
  }
  void assign_from(const LimbVec& o) {
    if (o.size_ > kInline) {
      data_ = new std::uint32_t[o.size_];
      cap_ = o.size_;
    }
    size_ = o.size_;
    for (std::size_t i = 0; i < size_; ++i) data_[i] = o.data_[i];
  }
  void steal(LimbVec& o) {
    if (o.on_heap()) {
      data_ = o.data_;
      size_ = o.size_;
      cap_ = o.cap_;
      o.data_ = o.inline_;
      o.size_ = 0;
      o.cap_ = kInline;
    } else {
      size_ = o.size_;
      for (std::size_t i = 0; i < size_; ++i) inline_[i] = o.inline_[i];
      data_ = inline_;
      cap_ = kInline;
      o.size_ = 0;
    }
  }
  void grow(std::size_t need) {
    std::size_t newcap = cap_ * 2 > need ? cap_ * 2 : need;
    auto* p = new std::uint32_t[newcap];
    for (std::size_t i = 0; i < size_; ++i) p[i] = data_[i];
    if (on_heap()) delete[] data_;
    data_ = p;
    cap_ = newcap;
  }
};

}  // namespace detail

/// Arbitrary-precision signed integer, sign-magnitude with 32-bit limbs.
/// Small enough values take single-limb fast paths throughout.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v);  // NOLINT: implicit by design, mirrors built-in ints

  static BigInt from_string(std::string_view s);
  std::string to_string() const;

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  BigInt abs() const;

  bool fits_int64() const;
  long long to_int64() const;  // requires fits_int64()
  std::uint64_t to_uint64_saturating() const;

  BigInt operator-() const;
  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  friend BigInt operator/(const BigInt& a, const BigInt& b);  // trunc toward 0
  friend BigInt operator%(const BigInt& a, const BigInt& b);  // sign of a

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  /// Truncated division: a == q*b + r, |r| < |b|, sign(r) == sign(a).
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  static BigInt gcd(const BigInt& a, const BigInt& b);  // nonnegative
  static BigInt pow10(unsigned k);
  static BigInt pow2(unsigned k);

  friend bool operator==(const BigInt& a, const BigInt& b);
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b);

  friend std::ostream& operator<<(std::ostream& os, const BigInt& v);

 private:
  int sign_ = 0;          // -1, 0, +1
  detail::LimbVec mag_;   // little-endian, no leading zero limbs

  static BigInt from_mag(int sign, detail::LimbVec mag);
  friend class Rational;
};

/// Exact rational number. Always kept reduced with a positive denominator;
/// zero is 0/1. Works as an Eigen scalar (see eigen_support.hpp).
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(long long num, long long den);
  Rational(BigInt num, BigInt den);

  /// Accepts "a/b", plain integers, and terminating decimals ("0.125").
  static Rational from_string(std::string_view s);

  /// "a/b", or just "a" when the denominator is 1.
  std::string to_string() const;

  /// Decimal rounded to `frac_digits` digits after the point (half away
  /// from zero), trailing zeros trimmed: 2415/1191016 -> "0.0020277".
  /// With trim=false the zeros stay ("0.500000" style).
  std::string to_decimal(int frac_digits = 7, bool trim = true) const;

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  int sign() const { return num_.sign(); }
  bool is_zero() const { return num_.is_zero(); }
  Rational abs() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::ostream& operator<<(std::ostream& os, const Rational& v);

  double to_double() const;  // lossy, for diagnostics only

 private:
  BigInt num_, den_;
  void normalize();
};

inline Rational abs(const Rational& r) { return r.abs(); }

}  // namespace synphy
