#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace kmapf {

// Population mean/std accumulator.
struct RunningStats {
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
  double variance() const {
    if (n == 0) return 0.0;
    double m = mean();
    double v = sum_sq / static_cast<double>(n) - m * m;
    return v > 0.0 ? v : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
};

inline double mean_of(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s.mean();
}

inline double population_std(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s.stddev();
}

}  // namespace kmapf
