#include <doctest.h>

#include <cmath>
#include <random>

#include "greedylab/greedy.hpp"
#include "oracles.hpp"

using namespace greedylab;

namespace {

/// Coefficients in {-2,-1.5,...,2} so ties and zeros are common.
std::vector<double> tied_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-4, 4);
  std::vector<double> v(n);
  for (auto& x : v) x = 0.5 * d(rng);
  return v;
}

}  // namespace

TEST_CASE("natural ordering examples") {
  CHECK(natural_ordering(CoefficientVector({0.5, -2, 1, 1})).rho ==
        std::vector<std::size_t>{1, 2, 3, 0});
  CHECK(natural_ordering(CoefficientVector({1, 1, 1})).rho == std::vector<std::size_t>{0, 1, 2});
  CHECK(natural_ordering(CoefficientVector({0, 5})).rho == std::vector<std::size_t>{1, 0});
}

TEST_CASE("greedy sets and sums") {
  const CoefficientVector x({0.5, -2, 1, 1});
  CHECK(greedy_set(x, 2) == IndexSet{1, 2});
  CHECK(greedy_set(x, 0).empty());
  CHECK(greedy_set(CoefficientVector({1, 1, 1}), 2) == IndexSet{0, 1});
  CHECK(greedy_sum(x, 2).vector() == std::vector<double>{0, -2, 1, 0});
  CHECK(greedy_sum(x, 0).vector() == std::vector<double>{0, 0, 0, 0});
  CHECK(greedy_sum(x, 4) == x);
  CHECK_THROWS_AS(greedy_set(x, 5), std::out_of_range);
  CHECK_THROWS_AS(greedy_sum(x, 5), std::out_of_range);
  // beyond the support, zero coordinates fill in index order
  CHECK(greedy_set(CoefficientVector({0, 3, 0, 0}), 3) == IndexSet{0, 1, 2});
}

TEST_CASE("greedy sets match repeated selection, with threshold and nesting") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 500; ++t) {
    const auto v = tied_vector(rng, 7);
    const CoefficientVector x(v);
    const auto rho = natural_ordering(x).rho;
    const auto supp = x.support();
    IndexSet head(rho.begin(), rho.begin() + static_cast<std::ptrdiff_t>(supp.size()));
    std::sort(head.begin(), head.end());
    CHECK(head == supp);
    for (std::size_t m = 0; m <= 7; ++m) {
      const auto a = greedy_set(x, m);
      CHECK(a == oracle::greedy(v, m));
      double inside = oracle::kInf, outside = 0.0;
      for (std::size_t i = 0; i < 7; ++i) {
        const bool in = std::binary_search(a.begin(), a.end(), i);
        (in ? inside : outside) = in ? std::min(inside, std::abs(v[i]))
                                     : std::max(outside, std::abs(v[i]));
      }
      if (m > 0 && m < 7) CHECK(inside >= outside);
      if (m < 7) {
        const auto next = greedy_set(x, m + 1);
        CHECK(std::includes(next.begin(), next.end(), a.begin(), a.end()));
      }
      CHECK(greedy_sum(x, m) == project(x, a));
    }
  }
}

TEST_CASE("truncation examples") {
  const auto r = truncate(CoefficientVector({2, -3, 0.5}), 1.0);
  CHECK(r.truncated.vector() == std::vector<double>{1, -1, 0.5});
  CHECK(r.gamma_alpha == IndexSet{0, 1});
  CHECK(r.gamma_signs == SignPattern({1, -1}));

  const CoefficientVector x({0.3, -0.2});
  const auto id = truncate(x, 1.0);
  CHECK(id.truncated == x);
  CHECK(id.gamma_alpha.empty());

  const CoefficientVector edge({0.5, -0.5});
  CHECK(truncate(edge, 0.5).truncated == edge);
  CHECK(truncate(edge, 0.5).gamma_alpha.empty());

  CHECK_THROWS_AS(truncate(x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(truncate(x, -1.0), std::invalid_argument);
  CHECK(truncate_scalar(-4.0, 1.5) == -1.5);
  CHECK(truncate_scalar(0.25, 1.5) == 0.25);
}

TEST_CASE("truncation contracts componentwise, matches its set formula, and is idempotent") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> alpha(0.05, 2.5);
  for (int t = 0; t < 500; ++t) {
    const CoefficientVector x(tied_vector(rng, 6));
    const double a = t % 5 == 0 ? 0.5 : alpha(rng);
    const auto r = truncate(x, a);
    auto formula = project(x, complement(r.gamma_alpha, 6)).vector();
    for (std::size_t k = 0; k < r.gamma_alpha.size(); ++k) {
      formula[r.gamma_alpha[k]] = a * r.gamma_signs[k];
    }
    CHECK(r.truncated.vector() == formula);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(std::abs(r.truncated[i]) <= std::abs(x[i]));
      CHECK(std::abs(r.truncated[i]) <= a);
      CHECK(std::abs(r.truncated[i]) == std::min(a, std::abs(x[i])));
      if (x[i] != 0.0) CHECK(std::signbit(r.truncated[i]) == std::signbit(x[i]));
    }
    CHECK(truncate(r.truncated, a).truncated == r.truncated);
  }
}
