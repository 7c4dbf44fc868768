#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace capkm {

using Rat = mpq_class;
using Int = mpz_class;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integral(const Rat& q) { return q.get_den() == 1; }

// This gmpxx has no long long constructors. long is 64 bit on the platforms
// we build for, so routing through it is lossless.
static_assert(sizeof(long) >= sizeof(long long), "need 64-bit long for exact conversions");
inline Rat rat_ll(long long v) { return Rat(static_cast<long>(v)); }
inline Int int_ll(long long v) { return Int(static_cast<long>(v)); }

// Rat(num, den) skips canonicalization, and GMP comparisons are undefined on
// non-canonical values. Route every fraction with runtime operands through
// here.
inline Rat rat_frac(long long num, long long den) {
  Rat q(int_ll(num), int_ll(den));
  q.canonicalize();
  return q;
}

// GMP keeps results of arithmetic canonical, but values assembled from raw
// numerator/denominator pairs may not be. Normalizing before == comparisons
// and hashing keeps those exact.
inline Rat canon(Rat q) {
  q.canonicalize();
  return q;
}

inline Int floor_int(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int ceil_int(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline double to_double(const Rat& q) { return q.get_d(); }

// Parses a plain decimal literal ("-3", "0.25", "12.000001") into an exact
// rational. Exponents are rejected: instance files carry fixed-point values.
inline Rat rat_from_decimal(std::string_view s) {
  if (s.empty()) throw ValidationError("empty decimal literal");
  bool neg = false;
  size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = (s[0] == '-');
    pos = 1;
  }
  std::string digits;
  long frac_digits = -1;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.') {
      if (frac_digits >= 0) throw ValidationError("two dots in decimal: " + std::string(s));
      frac_digits = 0;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (frac_digits >= 0) ++frac_digits;
    } else {
      throw ValidationError("bad decimal literal: " + std::string(s));
    }
  }
  if (digits.empty()) throw ValidationError("bad decimal literal: " + std::string(s));
  Int num(digits, 10);
  Int den(1);
  if (frac_digits > 0) {
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  }
  Rat q(num, den);
  q.canonicalize();
  if (neg) q = -q;
  return q;
}

// Canonical exact form "num/den" ("num" when den == 1).
inline std::string rat_to_string(const Rat& q) {
  if (is_integral(q)) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Fixed-point decimal with `digits` fractional digits, round half up.
// Used for report fields that must be byte-stable across platforms.
inline std::string rat_to_decimal(const Rat& q, int digits) {
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  // round(q * scale) with ties away from zero is floor(|q|*scale + 1/2) signed
  Rat scaled = q * Rat(scale);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  Int units = floor_int(scaled + Rat(1, 2));
  Int ip, fp;
  mpz_fdiv_qr(ip.get_mpz_t(), fp.get_mpz_t(), units.get_mpz_t(), scale.get_mpz_t());
  std::string out = ip.get_str();
  if (digits > 0) {
    std::string frac = fp.get_str();
    if (frac.size() < static_cast<size_t>(digits))
      frac.insert(frac.begin(), static_cast<size_t>(digits) - frac.size(), '0');
    out += "." + frac;
  }
  if (neg && (ip != 0 || fp != 0)) out.insert(out.begin(), '-');
  return out;
}

// Smallest m/2^log2_scale with (m/2^log2_scale)^2 >= sq. Requires sq >= 0.
// Rounding every distance up to one fixed grid keeps the triangle inequality
// exact: ceil(x+y) <= ceil(x)+ceil(y).
inline Rat sqrt_ceil_grid(const Rat& sq, unsigned log2_scale) {
  if (sq < 0) throw ValidationError("sqrt of negative value");
  if (sq == 0) return Rat(0);
  // want min m with m^2 * den >= num * 2^(2*scale)
  Int target = sq.get_num();
  mpz_mul_2exp(target.get_mpz_t(), target.get_mpz_t(), 2 * log2_scale);
  const Int& den = sq.get_den();
  Int m;
  mpz_fdiv_q(m.get_mpz_t(), target.get_mpz_t(), den.get_mpz_t());
  mpz_sqrt(m.get_mpz_t(), m.get_mpz_t());
  while (m * m * den < target) ++m;
  while (m > 0 && (m - 1) * (m - 1) * den >= target) --m;
  Int grid(1);
  mpz_mul_2exp(grid.get_mpz_t(), grid.get_mpz_t(), log2_scale);
  Rat q(m, grid);
  q.canonicalize();
  return q;
}

}  // namespace capkm
