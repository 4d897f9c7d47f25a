#pragma once

#include <cmath>

#include <Eigen/Core>

#ifndef __SIZEOF_INT128__
#error "ExactSum needs a compiler with __int128 support"
#endif

namespace belief {

/// Fixed-point accumulator with 64 fractional bits. Addition is exact, so a
/// sum does not depend on the order or grouping of its terms; this is what
/// makes partition-wise reductions bit-identical for any partition count.
/// Terms are truncated below 2^-64 and magnitudes must stay below 2^63.
class ExactSum {
 public:
  constexpr ExactSum() = default;
  ExactSum(double value)  // NOLINT(google-explicit-constructor)
      : raw_(static_cast<__int128>(std::ldexp(value, kFractionBits))) {}

  ExactSum& operator+=(const ExactSum& other) {
    raw_ += other.raw_;
    return *this;
  }
  friend ExactSum operator+(ExactSum a, const ExactSum& b) { return a += b; }
  friend ExactSum operator-(ExactSum a, const ExactSum& b) {
    a.raw_ -= b.raw_;
    return a;
  }
  friend ExactSum operator*(const ExactSum& a, const ExactSum& b) {
    return ExactSum(static_cast<double>(a) * static_cast<double>(b));
  }
  friend bool operator==(const ExactSum&, const ExactSum&) = default;
  friend bool operator<(const ExactSum& a, const ExactSum& b) {
    return a.raw_ < b.raw_;
  }

  explicit operator double() const {
    return std::ldexp(static_cast<double>(raw_), -kFractionBits);
  }

 private:
  static constexpr int kFractionBits = 64;
  __int128 raw_ = 0;
};

}  // namespace belief

namespace Eigen {

template <>
struct NumTraits<belief::ExactSum> : GenericNumTraits<belief::ExactSum> {
  using Real = belief::ExactSum;
  using NonInteger = belief::ExactSum;
  using Nested = belief::ExactSum;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 8
  };
  static inline int digits10() { return 19; }
  static inline belief::ExactSum epsilon() { return belief::ExactSum(0.0); }
  static inline belief::ExactSum dummy_precision() {
    return belief::ExactSum(0.0);
  }
  static inline belief::ExactSum highest() { return belief::ExactSum(0.0); }
  static inline belief::ExactSum lowest() { return belief::ExactSum(0.0); }
};

}  // namespace Eigen
