#include "aomdd/numeric.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace aomdd {

std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

double tolerance_for_digits(int digits) { return std::pow(10.0, -digits); }

bool weights_equal(double a, double b, int digits) {
  if (a == b) return true;
  if (a == 0.0 || b == 0.0) return false;
  return std::fabs(a - b) <= tolerance_for_digits(digits) * std::max(std::fabs(a), std::fabs(b));
}

WeightRegistry::WeightRegistry(int digits) : digits_(digits), tol_(tolerance_for_digits(digits)) {}

double WeightRegistry::snap(double w) {
  if (w == 0.0 || !std::isfinite(w)) return w;
  const double lo = w - tol_ * std::fabs(w);
  auto it = values_.lower_bound(lo);
  double best = w;
  double best_gap = -1.0;
  for (; it != values_.end(); ++it) {
    const double gap = std::fabs(*it - w);
    if (*it > w && gap > tol_ * std::fabs(*it)) break;
    if (gap <= tol_ * std::max(std::fabs(*it), std::fabs(w)) && (best_gap < 0 || gap < best_gap)) {
      best = *it;
      best_gap = gap;
    }
  }
  if (best_gap >= 0) return best;
  values_.insert(w);
  return w;
}

}  // namespace aomdd
