/*
 *   Copyright 2026 The kwmoments Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kwm {

/// Arbitrary-precision integer.
using BigInt = mpz_class;

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// A thin value type over GMP's mpq_class. Every constructor and every
/// arithmetic result is canonical, so equality is structural.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : q_(v) {}                   // NOLINT(google-explicit-constructor)
  Rational(long v) : q_(v) {}                  // NOLINT(google-explicit-constructor)
  Rational(long long v) : q_(BigInt(std::to_string(v))) {}  // NOLINT
  Rational(unsigned v) : q_(v) {}              // NOLINT(google-explicit-constructor)
  Rational(unsigned long v) : q_(v) {}         // NOLINT(google-explicit-constructor)
  Rational(const BigInt& v) : q_(v) {}         // NOLINT(google-explicit-constructor)

  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }

  /// Accepts "a", "a/b", and decimals such as "-0.25" or "1.5e-3".
  /// Decimals are converted exactly via scaled integers.
  static Rational parse(std::string_view text);

  BigInt numerator() const { return q_.get_num(); }
  BigInt denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  /// Nearest double when numerator and denominator are exact doubles (IEEE
  /// division rounds correctly); GMP's truncating conversion otherwise.
  double to_double() const {
    if (mpz_sizeinbase(q_.get_num_mpz_t(), 2) <= 53 && mpz_sizeinbase(q_.get_den_mpz_t(), 2) <= 53) {
      return q_.get_num().get_d() / q_.get_den().get_d();
    }
    return q_.get_d();
  }

  /// Natural logarithm of a positive value; safe for values far outside the
  /// double range.
  double log() const {
    if (sign() <= 0) throw std::domain_error("log of non-positive rational");
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, q_.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, q_.get_den_mpz_t());
    return std::log(mn) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
  }

  /// "num/den", denominator always printed.
  std::string to_string() const { return q_.get_num().get_str() + "/" + q_.get_den().get_str(); }

  /// Decimal rendering with `digits` significant digits.
  std::string to_decimal(int digits = 12) const;

  Rational pow(unsigned exponent) const {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q_.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), q_.get_den_mpz_t(), exponent);
    Rational r;
    r.q_ = mpq_class(num, den);  // already reduced: gcd of powers of coprime ints is 1
    return r;
  }

  Rational abs() const {
    Rational r;
    r.q_ = ::abs(q_);
    return r;
  }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero rational");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) {
    Rational r;
    r.q_ = -a.q_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  mpq_class q_{0};
};

inline Rational Rational::parse(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational { throw std::invalid_argument("not a rational: '" + s + "'"); };
  if (s.empty()) return fail();

  if (const auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0) return fail();
    if (den == 0) throw std::domain_error("rational with zero denominator: '" + s + "'");
    return Rational(num, den);
  }

  // Decimal, optionally with exponent.
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = (s[pos++] == '-');
  std::string digits;
  long scale = 0;
  bool seen_point = false, seen_digit = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return fail();
    ++pos;
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(pos), &used);
      if (pos + used != s.size()) return fail();
    } catch (const std::logic_error&) {
      return fail();
    }
  }
  BigInt num(digits, 10);
  if (negative) num = -num;
  const long shift = exponent - scale;
  BigInt ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  return shift >= 0 ? Rational(BigInt(num * ten_pow)) : Rational(num, ten_pow);
}

inline std::string Rational::to_decimal(int digits) const {
  if (digits < 1) digits = 1;
  mpf_class f(0, 64 + static_cast<mp_bitcnt_t>(digits) * 4);
  f = q_;
  // %Fg trims trailing zeros; keep the output stable across platforms.
  const int size = gmp_snprintf(nullptr, 0, "%.*Fg", digits, f.get_mpf_t());
  std::string out(static_cast<std::size_t>(size) + 1, '\0');
  gmp_snprintf(out.data(), out.size(), "%.*Fg", digits, f.get_mpf_t());
  out.resize(static_cast<std::size_t>(size));
  return out;
}

inline Rational pow(const Rational& r, unsigned exponent) { return r.pow(exponent); }

}  // namespace kwm
