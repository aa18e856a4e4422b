#pragma once

#include <cstdint>
#include <vector>

namespace agekin {

/// Stirling numbers of the first (signed) and second kind up to a fixed
/// order, with the moment conversions they induce.
class StirlingTable {
 public:
  explicit StirlingTable(std::size_t max_order);

  std::size_t max_order() const { return kmax_; }
  /// Signed first kind s(k, l).
  std::int64_t first(std::size_t k, std::size_t l) const;
  /// Second kind S(k, l).
  std::int64_t second(std::size_t k, std::size_t l) const;

  /// E[N^k] from { E[(N)_1], ..., E[(N)_k] } via Y = sum_l S(k,l) X_l.
  double factorial_to_raw(const std::vector<double>& falling, std::size_t k) const;
  /// E[(N)_k] from { E[N^1], ..., E[N^k] } via X = sum_l s(k,l) Y_l.
  double raw_to_factorial(const std::vector<double>& raw, std::size_t k) const;

  /// Verifies n^k = sum_l S(k,l) (n)_l on integers; returns false on failure.
  bool self_test() const;

 private:
  std::size_t kmax_;
  std::vector<std::vector<std::int64_t>> s1_;  // signed
  std::vector<std::vector<std::int64_t>> s2_;
};

}  // namespace agekin
