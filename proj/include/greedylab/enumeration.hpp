#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace greedylab {

/// Sorted, duplicate-free, 0-based coordinate indices.
using IndexSet = std::vector<std::size_t>;

/// Largest number of supports enumerated for one (dim, m) cell.
inline constexpr std::uint64_t kMaxSubsetsPerCell = 200'000;
/// Largest number of ±1 sign patterns enumerated for one set size.
inline constexpr std::uint64_t kMaxSignPatterns = 4'096;

/// Thrown instead of silently falling back to sampling when an exact
/// enumeration would exceed one of the caps above.
class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binomial coefficient, saturating at uint64 max.
inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * factor / i;
  }
  return result;
}

inline void require_subset_cap(std::size_t n, std::size_t k) {
  if (binomial(n, k) > kMaxSubsetsPerCell) {
    throw EnumerationCapError("enumeration cap exceeded: C(" + std::to_string(n) + "," +
                              std::to_string(k) + ") > kMaxSubsetsPerCell=" +
                              std::to_string(kMaxSubsetsPerCell));
  }
}

inline void require_sign_cap(std::size_t m) {
  if (m >= 63 || (std::uint64_t{1} << m) > kMaxSignPatterns) {
    throw EnumerationCapError("enumeration cap exceeded: 2^" + std::to_string(m) +
                              " > kMaxSignPatterns=" + std::to_string(kMaxSignPatterns));
  }
}

/// Visits every k-subset of {0..n-1} in lexicographic order.
template <class Visitor>
void for_each_combination(std::size_t n, std::size_t k, Visitor&& visit) {
  if (k > n) return;
  IndexSet current(k);
  for (std::size_t i = 0; i < k; ++i) current[i] = i;
  while (true) {
    visit(static_cast<const IndexSet&>(current));
    std::size_t i = k;
    while (i > 0 && current[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++current[i - 1];
    for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
}

/// Complement of a sorted set inside {0..dim-1}.
inline IndexSet complement(const IndexSet& set, std::size_t dim) {
  IndexSet out;
  out.reserve(dim - set.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (j < set.size() && set[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace greedylab
