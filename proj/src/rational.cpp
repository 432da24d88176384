#include "synphy/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <ostream>

#include "synphy/error.hpp"

namespace synphy {

namespace {

using Limb = std::uint32_t;
using DLimb = std::uint64_t;
using Mag = detail::LimbVec;
constexpr int kLimbBits = 32;

void trim(Mag& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

int cmp_mag(const Mag& a, const Mag& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

Mag add_mag(const Mag& a, const Mag& b) {
  const auto& big = a.size() >= b.size() ? a : b;
  const auto& small = a.size() >= b.size() ? b : a;
  Mag r;
  r.reserve(big.size() + 1);
  DLimb carry = 0;
  for (size_t i = 0; i < big.size(); ++i) {
    DLimb s = carry + big[i] + (i < small.size() ? small[i] : 0);
    r.push_back(static_cast<Limb>(s));
    carry = s >> kLimbBits;
  }
  if (carry) r.push_back(static_cast<Limb>(carry));
  return r;
}

// requires a >= b
Mag sub_mag(const Mag& a, const Mag& b) {
  Mag r;
  r.reserve(a.size());
  std::int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow -
                     (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
    if (d < 0) {
      d += (std::int64_t{1} << kLimbBits);
      borrow = 1;
    } else {
      borrow = 0;
    }
    r.push_back(static_cast<Limb>(d));
  }
  trim(r);
  return r;
}

Mag mul_mag(const Mag& a, const Mag& b) {
  if (a.empty() || b.empty()) return {};
  Mag r(a.size() + b.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    DLimb carry = 0;
    DLimb ai = a[i];
    for (size_t j = 0; j < b.size(); ++j) {
      DLimb t = ai * b[j] + r[i + j] + carry;
      r[i + j] = static_cast<Limb>(t);
      carry = t >> kLimbBits;
    }
    r[i + b.size()] = static_cast<Limb>(carry);
  }
  trim(r);
  return r;
}

std::uint64_t mag_u64(const Mag& m) {
  std::uint64_t v = 0;
  if (!m.empty()) v = m[0];
  if (m.size() > 1) v |= static_cast<std::uint64_t>(m[1]) << kLimbBits;
  return v;
}

Mag mag_from_u64(std::uint64_t v) {
  Mag m;
  if (v) m.push_back(static_cast<Limb>(v));
  if (v >> kLimbBits) m.push_back(static_cast<Limb>(v >> kLimbBits));
  return m;
}

// Divide by a single limb; returns remainder.
Limb divmod_small(const Mag& u, Limb v, Mag& q) {
  q.assign(u.size(), 0);
  DLimb rem = 0;
  for (size_t i = u.size(); i-- > 0;) {
    DLimb cur = (rem << kLimbBits) | u[i];
    q[i] = static_cast<Limb>(cur / v);
    rem = cur % v;
  }
  trim(q);
  return static_cast<Limb>(rem);
}

Mag shl_bits(const Mag& a, unsigned k) {
  if (a.empty()) return {};
  unsigned limb_shift = k / kLimbBits, bit_shift = k % kLimbBits;
  Mag r(a.size() + limb_shift + 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    DLimb t = static_cast<DLimb>(a[i]) << bit_shift;
    r[i + limb_shift] |= static_cast<Limb>(t);
    r[i + limb_shift + 1] |= static_cast<Limb>(t >> kLimbBits);
  }
  trim(r);
  return r;
}

Mag shr_bits(const Mag& a, unsigned k) {
  unsigned limb_shift = k / kLimbBits, bit_shift = k % kLimbBits;
  if (limb_shift >= a.size()) return {};
  Mag r(a.size() - limb_shift, 0);
  for (size_t i = 0; i < r.size(); ++i) {
    DLimb t = a[i + limb_shift] >> bit_shift;
    if (bit_shift && i + limb_shift + 1 < a.size()) {
      t |= static_cast<DLimb>(a[i + limb_shift + 1]) << (kLimbBits - bit_shift);
    }
    r[i] = static_cast<Limb>(t);
  }
  trim(r);
  return r;
}

// Knuth algorithm D on normalized operands; v.size() >= 2, u >= 0.
void divmod_knuth(const Mag& u_in, const Mag& v_in,
                  Mag& q, Mag& r) {
  const unsigned shift = std::countl_zero(v_in.back());
  Mag v = shl_bits(v_in, shift);
  Mag u = shl_bits(u_in, shift);
  const size_t n = v.size();
  const size_t m = u.size() - n;  // u >= v, so u.size() >= n
  u.resize(n + m + 1, 0);         // one high zero limb for u[j+n]

  q.assign(m + 1, 0);
  const DLimb base = DLimb{1} << kLimbBits;
  const DLimb vtop = v[n - 1];
  const DLimb vsecond = v[n - 2];

  for (size_t j = m + 1; j-- > 0;) {
    DLimb top = (static_cast<DLimb>(u[j + n]) << kLimbBits) | u[j + n - 1];
    DLimb qhat = top / vtop;
    DLimb rhat = top % vtop;
    while (qhat >= base ||
           qhat * vsecond > ((rhat << kLimbBits) | u[j + n - 2])) {
      --qhat;
      rhat += vtop;
      if (rhat >= base) break;
    }
    // multiply-subtract
    std::int64_t borrow = 0;
    DLimb carry = 0;
    for (size_t i = 0; i < n; ++i) {
      DLimb p = qhat * v[i] + carry;
      carry = p >> kLimbBits;
      std::int64_t d = static_cast<std::int64_t>(u[i + j]) -
                       static_cast<std::int64_t>(p & 0xFFFFFFFFu) - borrow;
      if (d < 0) {
        d += static_cast<std::int64_t>(base);
        borrow = 1;
      } else {
        borrow = 0;
      }
      u[i + j] = static_cast<Limb>(d);
    }
    std::int64_t d = static_cast<std::int64_t>(u[j + n]) -
                     static_cast<std::int64_t>(carry) - borrow;
    bool negative = d < 0;
    u[j + n] = static_cast<Limb>(d);
    if (negative) {
      // qhat was one too large: add back
      --qhat;
      DLimb c = 0;
      for (size_t i = 0; i < n; ++i) {
        DLimb s = static_cast<DLimb>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<Limb>(s);
        c = s >> kLimbBits;
      }
      u[j + n] = static_cast<Limb>(u[j + n] + c);
    }
    q[j] = static_cast<Limb>(qhat);
  }
  trim(q);
  u.resize(n);
  trim(u);
  r = shr_bits(u, shift);
}

void divmod_mag(const Mag& u, const Mag& v,
                Mag& q, Mag& r) {
  if (v.empty()) throw Error("BigInt: division by zero");
  if (cmp_mag(u, v) < 0) {
    q.clear();
    r = u;
    return;
  }
  if (u.size() <= 2 && v.size() <= 2) {
    std::uint64_t uu = mag_u64(u), vv = mag_u64(v);
    q = mag_from_u64(uu / vv);
    r = mag_from_u64(uu % vv);
    return;
  }
  if (v.size() == 1) {
    Limb rem = divmod_small(u, v[0], q);
    r.clear();
    if (rem) r.push_back(rem);
    return;
  }
  divmod_knuth(u, v, q, r);
}

// binary gcd: no hardware division in the loop
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  if (!a) return b;
  if (!b) return a;
  const int shift = std::countr_zero(a | b);
  a >>= std::countr_zero(a);
  do {
    b >>= std::countr_zero(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b);
  return a << shift;
}

unsigned __int128 gcd_u128(unsigned __int128 a, unsigned __int128 b) {
  auto ctz = [](unsigned __int128 x) {
    auto lo = static_cast<std::uint64_t>(x);
    if (lo) return std::countr_zero(lo);
    return 64 + std::countr_zero(static_cast<std::uint64_t>(x >> 64));
  };
  if (!a) return b;
  if (!b) return a;
  const int shift = ctz(a | b);
  a >>= ctz(a);
  do {
    b >>= ctz(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b);
  return a << shift;
}

}  // namespace

BigInt BigInt::from_mag(int sign, Mag mag) {
  BigInt r;
  trim(mag);
  r.mag_ = std::move(mag);
  r.sign_ = r.mag_.empty() ? 0 : sign;
  return r;
}

BigInt::BigInt(long long v) {
  if (v == 0) return;
  sign_ = v < 0 ? -1 : 1;
  // avoid overflow on LLONG_MIN
  std::uint64_t u = v < 0 ? ~static_cast<std::uint64_t>(v) + 1
                          : static_cast<std::uint64_t>(v);
  mag_ = mag_from_u64(u);
}

BigInt BigInt::from_string(std::string_view s) {
  size_t i = 0;
  int sign = 1;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    if (s[i] == '-') sign = -1;
    ++i;
  }
  if (i == s.size()) throw Error("BigInt: empty numeral");
  BigInt r;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw Error("BigInt: invalid digit in '" + std::string(s) + "'");
    r = r * BigInt(10) + BigInt(s[i] - '0');
  }
  if (!r.is_zero()) r.sign_ = sign;
  return r;
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  Mag cur = mag_;
  std::string digits;
  Mag q;
  while (!cur.empty()) {
    Limb rem = divmod_small(cur, 1000000000u, q);
    cur = q;
    for (int k = 0; k < 9; ++k) {
      digits.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  if (sign_ < 0) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

bool BigInt::fits_int64() const {
  if (mag_.size() > 2) return false;
  std::uint64_t u = mag_u64(mag_);
  if (sign_ >= 0) return u <= static_cast<std::uint64_t>(INT64_MAX);
  return u <= static_cast<std::uint64_t>(INT64_MAX) + 1;
}

long long BigInt::to_int64() const {
  std::uint64_t u = mag_u64(mag_);
  if (sign_ < 0) {
    if (u == static_cast<std::uint64_t>(INT64_MAX) + 1) return INT64_MIN;
    return -static_cast<long long>(u);
  }
  return static_cast<long long>(u);
}

std::uint64_t BigInt::to_uint64_saturating() const {
  if (sign_ <= 0) return 0;
  if (mag_.size() > 2) return UINT64_MAX;
  return mag_u64(mag_);
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  r.sign_ = -r.sign_;
  return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.sign_ == b.sign_) return BigInt::from_mag(a.sign_, add_mag(a.mag_, b.mag_));
  int c = cmp_mag(a.mag_, b.mag_);
  if (c == 0) return BigInt();
  return c > 0 ? BigInt::from_mag(a.sign_, sub_mag(a.mag_, b.mag_))
               : BigInt::from_mag(b.sign_, sub_mag(b.mag_, a.mag_));
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  if (a.is_zero() || b.is_zero()) return BigInt();
  int sign = a.sign_ * b.sign_;
  if (a.mag_.size() == 1 && b.mag_.size() == 1) {
    return BigInt::from_mag(
        sign, mag_from_u64(static_cast<DLimb>(a.mag_[0]) * b.mag_[0]));
  }
  return BigInt::from_mag(sign, mul_mag(a.mag_, b.mag_));
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  Mag qm, rm;
  divmod_mag(a.mag_, b.mag_, qm, rm);
  q = from_mag(a.sign_ * b.sign_, std::move(qm));
  r = from_mag(a.sign_, std::move(rm));
}

BigInt operator/(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return r;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
  if (a.mag_.size() <= 2 && b.mag_.size() <= 2) {
    return from_mag(1, mag_from_u64(gcd_u64(mag_u64(a.mag_), mag_u64(b.mag_))));
  }
  Mag x = a.mag_, y = b.mag_;
  while (!y.empty()) {
    Mag q, r;
    divmod_mag(x, y, q, r);
    x = std::move(y);
    y = std::move(r);
  }
  return from_mag(1, std::move(x));
}

BigInt BigInt::pow10(unsigned k) {
  BigInt r(1);
  BigInt ten(10);
  for (unsigned i = 0; i < k; ++i) r = r * ten;
  return r;
}

BigInt BigInt::pow2(unsigned k) {
  BigInt r(1);
  r.mag_ = shl_bits(r.mag_, k);
  return r;
}

bool operator==(const BigInt& a, const BigInt& b) {
  return a.sign_ == b.sign_ && a.mag_ == b.mag_;
}

std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
  if (a.sign_ != b.sign_)
    return a.sign_ < b.sign_ ? std::strong_ordering::less
                             : std::strong_ordering::greater;
  int c = cmp_mag(a.mag_, b.mag_) * (a.sign_ < 0 ? -1 : 1);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const BigInt& v) {
  return os << v.to_string();
}

// ---------------------------------------------------------------------------
// Rational

void Rational::normalize() {
  if (den_.is_zero()) throw Error("Rational: zero denominator");
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.fits_int64() && den_.fits_int64()) {
    long long n = num_.to_int64();
    std::uint64_t un = n < 0 ? ~static_cast<std::uint64_t>(n) + 1
                             : static_cast<std::uint64_t>(n);
    std::uint64_t ud = static_cast<std::uint64_t>(den_.to_int64());
    std::uint64_t g = gcd_u64(un, ud);
    if (g > 1) {
      un /= g;
      ud /= g;
      num_ = BigInt(n < 0 ? -static_cast<long long>(un)
                          : static_cast<long long>(un));
      den_ = BigInt(static_cast<long long>(ud));
    }
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (!(g == BigInt(1))) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

namespace {

inline bool small64(const Rational& r) {
  return r.num().fits_int64() && r.den().fits_int64();
}

}  // namespace

Rational::Rational(long long num, long long den) : num_(num), den_(den) {
  normalize();
}

Rational::Rational(BigInt num, BigInt den)
    : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

Rational Rational::from_string(std::string_view s) {
  // trim surrounding whitespace
  size_t b = s.find_first_not_of(" \t\r\n");
  size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string_view::npos) throw Error("Rational: empty numeral");
  s = s.substr(b, e - b + 1);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = BigInt::from_string(s.substr(0, slash));
    BigInt den = BigInt::from_string(s.substr(slash + 1));
    return Rational(std::move(num), std::move(den));
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.empty()) throw Error("Rational: truncated decimal '" + std::string(s) + "'");
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
    BigInt whole = ip.empty() ? BigInt(0) : BigInt::from_string(ip);
    BigInt frac = BigInt::from_string(fp);
    if (frac.sign() < 0) throw Error("Rational: malformed decimal '" + std::string(s) + "'");
    BigInt den = BigInt::pow10(static_cast<unsigned>(fp.size()));
    BigInt num = whole * den + frac;
    if (neg) num = -num;
    return Rational(std::move(num), std::move(den));
  }
  return Rational(BigInt::from_string(s), BigInt(1));
}

std::string Rational::to_string() const {
  if (den_ == BigInt(1)) return num_.to_string();
  return num_.to_string() + "/" + den_.to_string();
}

std::string Rational::to_decimal(int frac_digits, bool trim) const {
  BigInt n = num_.abs();
  BigInt scaled = n * BigInt::pow10(static_cast<unsigned>(frac_digits));
  // round half away from zero
  BigInt q, r;
  BigInt::divmod(scaled * BigInt(2) + den_, den_ * BigInt(2), q, r);
  std::string digits = q.to_string();
  std::string out;
  if (static_cast<int>(digits.size()) <= frac_digits) {
    digits.insert(0, static_cast<size_t>(frac_digits) + 1 - digits.size(), '0');
  }
  std::string ip = digits.substr(0, digits.size() - frac_digits);
  std::string fp = digits.substr(digits.size() - frac_digits);
  if (trim)
    while (!fp.empty() && fp.back() == '0') fp.pop_back();
  out = ip;
  if (!fp.empty()) out += "." + fp;
  if (sign() < 0 && out != "0") out.insert(0, "-");
  return out;
}

Rational Rational::abs() const {
  Rational r = *this;
  r.num_ = r.num_.abs();
  return r;
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (small64(a) && small64(b)) {
    const long long an = a.num_.to_int64(), bn = b.num_.to_int64();
    const long long ad = a.den_.to_int64(), bd = b.den_.to_int64();
    __int128 t = static_cast<__int128>(an) * bd + static_cast<__int128>(bn) * ad;
    unsigned __int128 d =
        static_cast<unsigned __int128>(ad) * static_cast<unsigned __int128>(bd);
    if (t == 0) return Rational();
    unsigned __int128 ut =
        t < 0 ? static_cast<unsigned __int128>(-t) : static_cast<unsigned __int128>(t);
    unsigned __int128 g = gcd_u128(ut, d);
    ut /= g;
    d /= g;
    if (!(ut >> 63) && !(d >> 63)) {
      Rational r;
      long long n = static_cast<long long>(static_cast<std::uint64_t>(ut));
      r.num_ = BigInt(t < 0 ? -n : n);
      r.den_ = BigInt(static_cast<long long>(static_cast<std::uint64_t>(d)));
      return r;
    }
  }
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (a.is_zero() || b.is_zero()) return Rational();
  if (small64(a) && small64(b)) {
    const long long an = a.num_.to_int64(), bn = b.num_.to_int64();
    std::uint64_t ua = an < 0 ? ~static_cast<std::uint64_t>(an) + 1
                              : static_cast<std::uint64_t>(an);
    std::uint64_t ub = bn < 0 ? ~static_cast<std::uint64_t>(bn) + 1
                              : static_cast<std::uint64_t>(bn);
    std::uint64_t ad = static_cast<std::uint64_t>(a.den_.to_int64());
    std::uint64_t bd = static_cast<std::uint64_t>(b.den_.to_int64());
    const std::uint64_t g1 = gcd_u64(ua, bd), g2 = gcd_u64(ub, ad);
    ua /= g1;
    bd /= g1;
    ub /= g2;
    ad /= g2;
    unsigned __int128 n = static_cast<unsigned __int128>(ua) * ub;
    unsigned __int128 d = static_cast<unsigned __int128>(ad) * bd;
    if (!(n >> 63) && !(d >> 63)) {
      Rational r;
      long long sn = static_cast<long long>(static_cast<std::uint64_t>(n));
      r.num_ = BigInt((an < 0) != (bn < 0) ? -sn : sn);
      r.den_ = BigInt(static_cast<long long>(static_cast<std::uint64_t>(d)));
      return r;
    }
  }
  // cross-reduce before multiplying to keep intermediates small
  BigInt g1 = BigInt::gcd(a.num_, b.den_);
  BigInt g2 = BigInt::gcd(b.num_, a.den_);
  Rational r;
  r.num_ = (a.num_ / g1) * (b.num_ / g2);
  r.den_ = (a.den_ / g2) * (b.den_ / g1);
  return r;
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw Error("Rational: division by zero");
  Rational inv;
  inv.num_ = b.den_;
  inv.den_ = b.num_;
  if (inv.den_.sign() < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return a * inv;
}

bool operator==(const Rational& a, const Rational& b) {
  return a.num_ == b.num_ && a.den_ == b.den_;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (small64(a) && small64(b)) {
    __int128 lhs = static_cast<__int128>(a.num_.to_int64()) * b.den_.to_int64();
    __int128 rhs = static_cast<__int128>(b.num_.to_int64()) * a.den_.to_int64();
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  return (a.num_ * b.den_) <=> (b.num_ * a.den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& v) {
  return os << v.to_string();
}

double Rational::to_double() const {
  return std::strtod(to_decimal(17).c_str(), nullptr);
}

}  // namespace synphy
