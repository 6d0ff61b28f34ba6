#pragma once

#include <set>
#include <string>

namespace aomdd {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_shortest(double v);

/// Relative tolerance 10^-digits.
double tolerance_for_digits(int digits);

/// True iff |a - b| <= 10^-digits * max(|a|, |b|). Exact zeros only equal
/// zero.
bool weights_equal(double a, double b, int digits = 12);

/// Interns weights so that values equal under weights_equal collapse onto
/// one representative. Hashing and equality on interned values are then
/// exact and agree with each other.
class WeightRegistry {
 public:
  explicit WeightRegistry(int digits = 12);

  double snap(double w);
  int digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  int digits_;
  double tol_;
  std::set<double> values_;
};

}  // namespace aomdd
