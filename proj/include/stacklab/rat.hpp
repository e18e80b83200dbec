#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>

namespace stacklab {

using Int = mpz_class;

// Exact arbitrary-precision rational, canonical by construction (den > 0,
// lowest terms). GMP comparisons require canonical operands, so raw
// mpq_class values never escape this wrapper.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}
  Rat(long n) : v_(n) {}
  Rat(long long n) : v_(static_cast<long>(n)) {}
  template <typename N, typename D,
            typename = std::enable_if_t<std::is_integral_v<N> && std::is_integral_v<D>>>
  Rat(N n, D d) : Rat(static_cast<long>(n), static_cast<long>(d)) {}
  Rat(long n, long d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    v_ = mpq_class(n, d);
    v_.canonicalize();
  }
  explicit Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  const mpq_class& raw() const { return v_; }
  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  int sign() const { return sgn(v_); }

  friend Rat operator+(const Rat& a, const Rat& b) { return wrap(a.v_ + b.v_); }
  friend Rat operator-(const Rat& a, const Rat& b) { return wrap(a.v_ - b.v_); }
  friend Rat operator*(const Rat& a, const Rat& b) { return wrap(a.v_ * b.v_); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.v_ == 0) throw std::invalid_argument("rational division by zero");
    return wrap(a.v_ / b.v_);
  }
  Rat operator-() const { return wrap(-v_); }
  Rat& operator+=(const Rat& r) {
    v_ += r.v_;
    return *this;
  }
  Rat& operator-=(const Rat& r) {
    v_ -= r.v_;
    return *this;
  }
  Rat& operator*=(const Rat& r) {
    v_ *= r.v_;
    return *this;
  }
  Rat& operator/=(const Rat& r) {
    if (r.v_ == 0) throw std::invalid_argument("rational division by zero");
    v_ /= r.v_;
    return *this;
  }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

 private:
  static Rat wrap(mpq_class v) {
    // Results of GMP arithmetic on canonical operands are canonical.
    Rat r;
    r.v_ = std::move(v);
    return r;
  }
  mpq_class v_;
};

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

// Parses "num/den" or "num". Throws std::invalid_argument on malformed input.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class v;
  if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (v.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  return Rat(std::move(v));
}

// Always emits "num/den", matching the wire format ("3" becomes "3/1").
inline std::string rat_to_string(const Rat& r) {
  return r.num().get_str() + "/" + r.den().get_str();
}

inline Rat rat_abs(const Rat& r) { return r < Rat(0) ? -r : r; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

}  // namespace stacklab
