#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmult {

// Order of a Schatten norm: a real value >= 1, or the operator norm (infinity).
// Infinity is a distinguished state, never a large float.
class NormOrder {
public:
  explicit NormOrder(double value) : value_(value) {
    if (!(value >= 1.0) || std::isinf(value)) {
      throw std::invalid_argument("norm order must be a finite value >= 1 (use NormOrder::infinity())");
    }
  }

  static NormOrder infinity() { return NormOrder(); }

  bool is_infinite() const { return infinite_; }
  bool is_integer() const { return !infinite_ && value_ == std::floor(value_); }
  bool is_one() const { return !infinite_ && value_ == 1.0; }

  // Finite value; throws for the infinite order.
  double value() const {
    if (infinite_) throw std::logic_error("infinite norm order has no finite value");
    return value_;
  }

  // Spelled "inf" for the operator norm, shortest round-trip decimal otherwise.
  std::string to_string() const;

  // Accepts "inf", "infinity", "∞" or a decimal >= 1.
  static NormOrder parse(const std::string& text);

  friend bool operator==(const NormOrder& a, const NormOrder& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<(const NormOrder& a, const NormOrder& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }

private:
  NormOrder() : value_(std::numeric_limits<double>::infinity()), infinite_(true) {}

  double value_;
  bool infinite_ = false;
};

}  // namespace qmult
