#pragma once

#include <cstddef>
#include <vector>

#include "greedylab/spaces.hpp"

namespace greedylab {

/// Permutation rho of {0..dim-1}: magnitudes nonincreasing, ties in
/// increasing index order, zero coefficients last.
struct GreedyOrdering {
  std::vector<std::size_t> rho;
};

GreedyOrdering natural_ordering(const CoefficientVector& x);

/// A_m(x) = {rho(0..m-1)}, returned sorted. For m > |supp x| the remaining
/// slots are filled with zero coordinates in increasing index order.
IndexSet greedy_set(const CoefficientVector& x, std::size_t m);

/// G_m(x) = P_{A_m(x)}(x).
CoefficientVector greedy_sum(const CoefficientVector& x, std::size_t m);

struct TruncationResult {
  CoefficientVector truncated;
  IndexSet gamma_alpha;     // {n : |x_n| > alpha}
  SignPattern gamma_signs;  // sgn x_n on gamma_alpha
};

/// T_alpha(x): clamps every coefficient to magnitude alpha, keeping signs.
/// Throws std::invalid_argument for alpha <= 0.
TruncationResult truncate(const CoefficientVector& x, double alpha);

/// Scalar truncation function T_alpha(t).
double truncate_scalar(double t, double alpha);

}  // namespace greedylab
