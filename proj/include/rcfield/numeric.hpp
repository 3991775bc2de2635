#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace rcfield {

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// Raised when an exhaustive enumeration would exceed its configured size.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when every configuration of a measure has zero weight.
class DegenerateMeasure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(exp(a) + exp(b)) with -inf treated as an exact zero.
inline double log_add(double a, double b) {
  if (a == kMinusInfinity) return b;
  if (b == kMinusInfinity) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kMinusInfinity;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kMinusInfinity) return kMinusInfinity;
  CompensatedSum s;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s.value());
}

/// log(2 cosh x), stable for large |x|.
inline double log_two_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

/// log(e^x - 1) for x >= 0; -inf at x = 0.
inline double log_expm1(double x) {
  if (x <= 0.0) return kMinusInfinity;
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

/// Relative discrepancy between two positive quantities given by their logs.
inline double relative_error_from_logs(double log_a, double log_b) {
  if (log_a == kMinusInfinity && log_b == kMinusInfinity) return 0.0;
  return std::abs(std::expm1(log_a - log_b));
}

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exponent,
                                   std::uint64_t cap, const std::string& what) {
  std::uint64_t result = 1;
  for (std::size_t k = 0; k < exponent; ++k) {
    if (base != 0 && result > cap / base) {
      throw CapExceeded(what + ": enumeration exceeds cap of " + std::to_string(cap));
    }
    result *= base;
  }
  if (result > cap) {
    throw CapExceeded(what + ": enumeration exceeds cap of " + std::to_string(cap));
  }
  return result;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

}  // namespace rcfield
