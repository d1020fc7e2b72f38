#include "greedylab/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "greedylab/greedy.hpp"

namespace greedylab {

namespace {

IndexSet last_block(std::size_t dim, std::size_t size) {
  IndexSet block(size);
  for (std::size_t k = 0; k < size; ++k) block[k] = dim - size + k;
  return block;
}

}  // namespace

SuperDemocracyGadget make_superdemocracy_gadget(std::size_t dim, const IndexSet& a_set,
                                                const SignPattern& a_signs, const IndexSet& b_set,
                                                const SignPattern& b_signs, double delta) {
  if (a_set.size() > b_set.size()) {
    throw std::invalid_argument("gadget geometry: need |A| <= |B|");
  }
  if (a_set.empty()) throw std::invalid_argument("gadget geometry: A must be nonempty");
  if (!(delta > 0.0)) throw std::invalid_argument("gadget delta must be > 0");
  if (a_set.size() > dim) throw std::invalid_argument("gadget geometry: D does not fit");
  const auto d_block = last_block(dim, a_set.size());
  const std::size_t top = std::max(a_set.back(), b_set.back());
  if (top >= d_block.front()) {
    throw std::invalid_argument("gadget geometry: D = {" + std::to_string(d_block.front() + 1) +
                                ".." + std::to_string(dim) + "} is not strictly beyond A and B");
  }
  auto z = indicator(a_set, a_signs, dim).vector();
  auto y = indicator(b_set, b_signs, dim).vector();
  for (double& v : y) v *= 1.0 + delta;
  for (std::size_t i : d_block) {
    z[i] = 1.0 + delta;
    y[i] = 1.0;
  }
  return {a_set,
          a_signs,
          b_set,
          b_signs,
          d_block,
          delta,
          CoefficientVector(std::move(z)),
          CoefficientVector(std::move(y))};
}

std::size_t max_fresh_block(const CoefficientVector& x) {
  const auto supp = x.support();
  return supp.empty() ? x.dim() : x.dim() - 1 - supp.back();
}

QuasiGreedyGadget make_quasigreedy_gadget(const CoefficientVector& x, std::size_t m,
                                          double delta) {
  const auto supp = x.support();
  if (m == 0 || m > supp.size()) {
    throw std::invalid_argument("gadget geometry: need 1 <= m <= |supp x|");
  }
  if (m > max_fresh_block(x)) {
    throw std::invalid_argument("gadget geometry: D of size " + std::to_string(m) +
                                " does not fit beyond supp x");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("gadget delta must be > 0");
  const auto greedy = greedy_set(x, m);
  double alpha = std::abs(x[greedy.front()]);
  for (std::size_t j : greedy) alpha = std::min(alpha, std::abs(x[j]));
  const auto d_block = last_block(x.dim(), m);

  auto z = x.vector();
  auto y = x.vector();
  auto perturbed = x.vector();
  for (std::size_t j : greedy) {
    z[j] = 0.0;
    const double shift = delta * (x[j] > 0 ? 1.0 : -1.0);
    y[j] += shift;
    perturbed[j] += shift;
  }
  for (std::size_t i : d_block) {
    z[i] = delta + alpha;
    y[i] = alpha;
  }
  return {greedy,
          d_block,
          alpha,
          delta,
          CoefficientVector(std::move(z)),
          CoefficientVector(std::move(y)),
          CoefficientVector(std::move(perturbed))};
}

}  // namespace greedylab
