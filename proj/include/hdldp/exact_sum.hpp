//
// Copyright 2026 The hdldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef HDLDP_EXACT_SUM_HPP_
#define HDLDP_EXACT_SUM_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace hdldp {

/// Exact floating-point accumulator (Shewchuk expansions, the fsum
/// algorithm). The represented sum is exact, so value() is the correctly
/// rounded total regardless of the order values were added in and regardless
/// of how partial accumulators were merged. That is the property the
/// aggregation contracts rely on: permuting or re-grouping a report stream
/// cannot change the result bitwise.
class ExactSum {
 public:
  void add(double x) {
    std::size_t used = 0;
    for (std::size_t j = 0; j < partials_.size(); ++j) {
      double y = partials_[j];
      if (std::fabs(x) < std::fabs(y)) {
        double tmp = x;
        x = y;
        y = tmp;
      }
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[used++] = lo;
      x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
  }

  void merge(const ExactSum& other) {
    for (double p : other.partials_) add(p);
  }

  /// Correctly rounded value of the exact sum (round-half-even), including
  /// the halfway correction from CPython's fsum.
  double value() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

  void reset() { partials_.clear(); }

  bool empty() const { return partials_.empty(); }

 private:
  // Non-overlapping partials in increasing magnitude; their exact sum is the
  // accumulated total.
  std::vector<double> partials_;
};

/// Correctly rounded sum of a range of doubles.
template <typename Iterator>
double exact_sum(Iterator first, Iterator last) {
  ExactSum acc;
  for (; first != last; ++first) acc.add(*first);
  return acc.value();
}

}  // namespace hdldp

#endif  // HDLDP_EXACT_SUM_HPP_
