#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gamelab {

// Exact rational number. Always stored in lowest terms with a positive
// denominator (canonicalization handled by GMP).
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}              // NOLINT: implicit by design
  Rational(long n) : v_(static_cast<long>(n)) {}  // NOLINT
  Rational(long num, long den);
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  // Accepts "p/q", plain integers, and decimal literals ("0.01" -> 1/100).
  static Rational parse(const std::string& text);

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  // "p" when the denominator is 1, "p/q" otherwise.
  std::string str() const;
  double to_double() const { return v_.get_d(); }
  const mpq_class& raw() const { return v_; }

  Rational abs() const { return Rational(mpq_class(::abs(v_))); }

 private:
  mpq_class v_;
};

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

Rational dot(const RatVec& a, const RatVec& b);
RatMat rat_matrix(int rows, int cols, const Rational& fill = Rational());

std::vector<double> to_doubles(const RatVec& v);
std::vector<std::vector<double>> to_doubles(const RatMat& m);

// Deterministic 64-bit seed mixer for deriving independent RNG streams.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gamelab
