#include "greedylab/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "greedylab/format.hpp"

namespace greedylab {

GreedyOrdering natural_ordering(const CoefficientVector& x) {
  GreedyOrdering ordering;
  ordering.rho.resize(x.dim());
  std::iota(ordering.rho.begin(), ordering.rho.end(), std::size_t{0});
  // stable: equal magnitudes keep increasing index order
  std::stable_sort(ordering.rho.begin(), ordering.rho.end(), [&x](std::size_t a, std::size_t b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  return ordering;
}

IndexSet greedy_set(const CoefficientVector& x, std::size_t m) {
  if (m > x.dim()) {
    throw std::out_of_range("greedy set size m=" + std::to_string(m) + " exceeds dim " +
                            std::to_string(x.dim()));
  }
  const auto ordering = natural_ordering(x);
  IndexSet set(ordering.rho.begin(), ordering.rho.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(set.begin(), set.end());
  return set;
}

CoefficientVector greedy_sum(const CoefficientVector& x, std::size_t m) {
  return project(x, greedy_set(x, m));
}

double truncate_scalar(double t, double alpha) {
  if (std::abs(t) > alpha) return t > 0 ? alpha : -alpha;
  return t;
}

TruncationResult truncate(const CoefficientVector& x, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("truncation level alpha must be > 0, got " + format_double(alpha));
  }
  std::vector<double> out(x.dim());
  IndexSet gamma;
  std::vector<int> signs;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = truncate_scalar(x[i], alpha);
    if (std::abs(x[i]) > alpha) {
      gamma.push_back(i);
      signs.push_back(x[i] > 0 ? 1 : -1);
    }
  }
  return {CoefficientVector(std::move(out)), std::move(gamma), SignPattern(std::move(signs))};
}

}  // namespace greedylab
