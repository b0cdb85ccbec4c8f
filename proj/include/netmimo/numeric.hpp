#pragma once

#include <cmath>

namespace netmimo {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace netmimo
