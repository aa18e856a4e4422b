#include "agekin/stirling.hpp"

#include <stdexcept>

namespace agekin {

StirlingTable::StirlingTable(std::size_t max_order) : kmax_(max_order) {
  if (max_order > 20)
    throw std::invalid_argument("StirlingTable: order too large for int64");
  s1_.assign(kmax_ + 1, std::vector<std::int64_t>(kmax_ + 1, 0));
  s2_.assign(kmax_ + 1, std::vector<std::int64_t>(kmax_ + 1, 0));
  s1_[0][0] = s2_[0][0] = 1;
  for (std::size_t k = 1; k <= kmax_; ++k) {
    for (std::size_t l = 1; l <= k; ++l) {
      // s(k,l) = s(k-1,l-1) - (k-1) s(k-1,l);  S(k,l) = S(k-1,l-1) + l S(k-1,l)
      s1_[k][l] = s1_[k - 1][l - 1] -
                  static_cast<std::int64_t>(k - 1) * s1_[k - 1][l];
      s2_[k][l] = s2_[k - 1][l - 1] +
                  static_cast<std::int64_t>(l) * s2_[k - 1][l];
    }
  }
}

std::int64_t StirlingTable::first(std::size_t k, std::size_t l) const {
  if (k > kmax_ || l > kmax_) throw std::out_of_range("StirlingTable: order overflow");
  return s1_[k][l];
}

std::int64_t StirlingTable::second(std::size_t k, std::size_t l) const {
  if (k > kmax_ || l > kmax_) throw std::out_of_range("StirlingTable: order overflow");
  return s2_[k][l];
}

double StirlingTable::factorial_to_raw(const std::vector<double>& falling,
                                       std::size_t k) const {
  if (k > kmax_) throw std::out_of_range("StirlingTable: order overflow");
  if (falling.size() < k) throw std::invalid_argument("need moments up to order k");
  double y = 0.0;
  for (std::size_t l = 1; l <= k; ++l)
    y += static_cast<double>(s2_[k][l]) * falling[l - 1];
  return y;
}

double StirlingTable::raw_to_factorial(const std::vector<double>& raw,
                                       std::size_t k) const {
  if (k > kmax_) throw std::out_of_range("StirlingTable: order overflow");
  if (raw.size() < k) throw std::invalid_argument("need moments up to order k");
  double x = 0.0;
  for (std::size_t l = 1; l <= k; ++l)
    x += static_cast<double>(s1_[k][l]) * raw[l - 1];
  return x;
}

bool StirlingTable::self_test() const {
  for (std::size_t k = 0; k <= kmax_; ++k) {
    for (std::int64_t n = 0; n <= static_cast<std::int64_t>(kmax_); ++n) {
      std::int64_t lhs = 1;
      for (std::size_t p = 0; p < k; ++p) lhs *= n;
      std::int64_t rhs = 0;
      for (std::size_t l = 0; l <= k; ++l) {
        std::int64_t falling = 1;
        for (std::size_t p = 0; p < l; ++p) falling *= n - static_cast<std::int64_t>(p);
        rhs += s2_[k][l] * falling;
      }
      if (lhs != rhs) return false;
    }
  }
  return true;
}

}  // namespace agekin
