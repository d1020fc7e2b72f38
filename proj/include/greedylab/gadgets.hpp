#pragma once

#include <cstddef>
#include <vector>

#include "greedylab/spaces.hpp"

namespace greedylab {

/// Vectors used to show that a semi-greedy basis is super-democratic:
///   z = 1_{eps A} + (1+delta) 1_D,   y = (1+delta) 1_{eta B} + 1_D
/// with D a fresh block beyond A and B.
struct SuperDemocracyGadget {
  IndexSet a_set;
  SignPattern a_signs;
  IndexSet b_set;
  SignPattern b_signs;
  IndexSet d_block;
  double delta = 0.0;
  CoefficientVector z;
  CoefficientVector y;
};

/// The fresh block is the last |A| coordinates. Throws std::invalid_argument
/// if |A| > |B| or the block does not lie strictly beyond A and B.
SuperDemocracyGadget make_superdemocracy_gadget(std::size_t dim, const IndexSet& a_set,
                                                const SignPattern& a_signs, const IndexSet& b_set,
                                                const SignPattern& b_signs, double delta);

/// Vectors used to show that a semi-greedy basis is quasi-greedy. With
/// alpha = min_{A_m(x)} |x_j|:
///   z = x - G_m(x) + (delta + alpha) 1_D
///   y = sum_{A_m} (x_j + delta sgn x_j) e_j + P_{A_m^c}(x) + alpha 1_D
struct QuasiGreedyGadget {
  IndexSet greedy;   // A_m(x)
  IndexSet d_block;  // last m coordinates
  double alpha = 0.0;
  double delta = 0.0;
  CoefficientVector z;
  CoefficientVector y;
  /// x + delta * sgn(x) on A_m(x), the comparison vector for y.
  CoefficientVector perturbed_x;
};

/// Requires 1 <= m <= |supp x| and supp x strictly before the last m
/// coordinates.
QuasiGreedyGadget make_quasigreedy_gadget(const CoefficientVector& x, std::size_t m, double delta);

/// The largest m for which D = last m coordinates still lies beyond supp(x).
std::size_t max_fresh_block(const CoefficientVector& x);

}  // namespace greedylab
