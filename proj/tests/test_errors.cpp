#include <doctest.h>

#include <cmath>
#include <random>

#include "greedylab/errors.hpp"
#include "greedylab/greedy.hpp"
#include "oracles.hpp"

using namespace greedylab;

namespace {

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double greedy_err(const SpaceSpec& s, const CoefficientVector& x, std::size_t m) {
  auto r = x.vector();
  for (auto i : greedy_set(x, m)) r[i] = 0.0;
  return s.norm(r);
}

EstimatorOptions estimator(const SpaceSpec& s, std::size_t budget, std::uint64_t seed = 1) {
  EstimatorOptions o;
  o.budget = budget;
  o.seed = seed;
  o.solver = default_chebyshev_options(s, seed);
  return o;
}

}  // namespace

TEST_CASE("sigma examples") {
  const auto lp2 = SpaceSpec::parse("lp:p=2:dim=3");
  const auto sum = SpaceSpec::summing(3);
  const CoefficientVector x({3, 2, 1});
  const auto o = default_chebyshev_options(lp2);
  const auto s1 = sigma_m(lp2, x, 1, o);
  CHECK(s1.value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(s1.support == IndexSet{0});
  CHECK(sigma_m(lp2, x, 0, o).value == eval_norm(lp2, x));
  CHECK(sigma_m(sum, x, 0, o).value == eval_norm(sum, x));

  const CoefficientVector y({2, -1, 1});
  const double oracle_sigma = oracle::sigma(oracle::summing, y.vector(), 1);
  const auto sy = sigma_m(sum, y, 1, default_chebyshev_options(sum));
  CHECK(oracle_sigma == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sy.value == doctest::Approx(oracle_sigma).epsilon(1e-9));
  CHECK(sy.support == IndexSet{0});
  CHECK(sy.coefficients[0] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("sigma tilde examples") {
  const auto lp2 = SpaceSpec::parse("lp:p=2:dim=3");
  CHECK(sigma_tilde_m(lp2, CoefficientVector({3, 2, 1}), 1).value ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  const auto sum = SpaceSpec::summing(3);
  const auto st = sigma_tilde_m(sum, CoefficientVector({2, -1, 1}), 1);
  CHECK(st.value == 1.0);
  CHECK(st.support == IndexSet{0});
  CHECK(sigma_tilde_m(sum, CoefficientVector({2, -1, 1}), 0).value == 2.0);
}

TEST_CASE("sigma and sigma tilde match brute-force oracles") {
  std::mt19937_64 rng(41);
  for (const auto& s : builtin_spaces(5)) {
    const auto ref = oracle::from_canonical(s.canonical(), 5);
    for (int t = 0; t < 8; ++t) {
      const auto v = gaussian(rng, 5);
      const CoefficientVector x(v);
      for (std::size_t m = 0; m <= 5; ++m) {
        CHECK(sigma_tilde_m(s, x, m).value == doctest::Approx(oracle::sigma_tilde(ref, v, m)));
      }
      for (std::size_t m = 0; m <= 2; ++m) {
        CAPTURE(s.canonical());
        CHECK(std::abs(sigma_m(s, x, m, default_chebyshev_options(s)).value -
                       oracle::sigma(ref, v, m)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("error curve ordering and monotonicity") {
  std::mt19937_64 rng(42);
  for (const auto& s : builtin_spaces(6)) {
    for (int t = 0; t < 15; ++t) {
      const CoefficientVector x(gaussian(rng, 6));
      const auto o = default_chebyshev_options(s, 2);
      const auto curve = error_curve(s, x, 6, o);
      REQUIRE(curve.rows.size() == 7);
      const double nx = eval_norm(s, x);
      CHECK(curve.rows[0].sigma == nx);
      CHECK(curve.rows[0].sigma_tilde == nx);
      CHECK(curve.rows[0].greedy_err == nx);
      CHECK(curve.rows[0].cheb_err == nx);
      for (std::size_t m = 0; m <= 6; ++m) {
        const auto& r = curve.rows[m];
        const double tol = o.tol + 1e-12;
        CHECK(r.m == m);
        CHECK(r.sigma <= r.sigma_tilde + tol);
        CHECK(r.sigma_tilde <= r.greedy_err + tol);
        CHECK(r.cheb_err <= r.greedy_err + tol);
        CHECK(r.greedy_err == greedy_err(s, x, m));
        if (m > 0) {
          CHECK(r.sigma <= curve.rows[m - 1].sigma);
          CHECK(r.sigma_tilde <= curve.rows[m - 1].sigma_tilde);
        }
      }
    }
  }
}

TEST_CASE("Hilbert identities for sigma") {
  std::mt19937_64 rng(43);
  const auto s = SpaceSpec::parse("lp:p=2:dim=7");
  for (int t = 0; t < 40; ++t) {
    const CoefficientVector x(gaussian(rng, 7));
    for (std::size_t m = 0; m <= 7; ++m) {
      const double g = greedy_err(s, x, m);
      CHECK(std::abs(sigma_m(s, x, m, default_chebyshev_options(s)).value - g) <= 1e-9);
      CHECK(std::abs(sigma_tilde_m(s, x, m).value - g) <= 1e-9);
    }
  }
}

TEST_CASE("enumeration caps refuse instead of sampling") {
  const auto big = SpaceSpec::parse("lp:p=1:dim=22");
  CHECK_THROWS_AS(sigma_tilde_m(big, CoefficientVector::zeros(22), 11), EnumerationCapError);
  CHECK_THROWS_AS(sigma_m(big, CoefficientVector::zeros(22), 11, {}), EnumerationCapError);
  CHECK_THROWS_AS(democracy_table(SpaceSpec::summing(13), 13), EnumerationCapError);
  CHECK_NOTHROW(sigma_tilde_m(SpaceSpec::parse("lp:p=1:dim=20"), CoefficientVector::zeros(20), 10));
}

TEST_CASE("democracy table examples") {
  const auto l1 = democracy_table(SpaceSpec::parse("lp:p=1:dim=6"), 6);
  for (std::size_t m = 1; m <= 6; ++m) {
    CHECK(l1.at(m).phi == static_cast<double>(m));
    CHECK(l1.at(m).psi == static_cast<double>(m));
  }
  const auto linf = democracy_table(SpaceSpec::parse("lp:p=inf:dim=6"), 6);
  for (const auto& r : linf.rows) {
    CHECK(r.phi == 1.0);
    CHECK(r.psi == 1.0);
  }
  const auto sum = democracy_table(SpaceSpec::summing(6), 6);
  CHECK(sum.at(4).phi == 4.0);
  CHECK(sum.at(4).psi == 1.0);
  CHECK(sum.at(4).argmax_signs == SignPattern::all_plus(4));
  CHECK(sum.phi(0) == 0.0);
}

TEST_CASE("democracy tables match base-3 enumeration and re-evaluate exactly") {
  for (const auto& s : builtin_spaces(6)) {
    const auto ref = oracle::from_canonical(s.canonical(), 6);
    const auto table = democracy_table(s, 6);
    for (std::size_t m = 1; m <= 6; ++m) {
      const auto r = table.at(m);
      const auto o = oracle::phi_psi(ref, 6, m);
      CAPTURE(s.canonical());
      CHECK(r.phi == doctest::Approx(o.phi).epsilon(1e-14));
      CHECK(r.psi == doctest::Approx(o.psi).epsilon(1e-14));
      CHECK(r.phi_plain == doctest::Approx(o.phi_plain).epsilon(1e-14));
      CHECK(r.psi_plain == doctest::Approx(o.psi_plain).epsilon(1e-14));
      CHECK(r.phi >= r.phi_plain);
      CHECK(r.psi <= r.psi_plain);
      CHECK(eval_norm(s, indicator(r.argmax_set, r.argmax_signs, 6)) == r.phi);
      CHECK(eval_norm(s, indicator(r.argmin_set, r.argmin_signs, 6)) == r.psi);
      CHECK(eval_norm(s, indicator(r.argmax_plain_set, SignPattern::all_plus(m), 6)) ==
            r.phi_plain);
      CHECK(eval_norm(s, indicator(r.argmin_plain_set, SignPattern::all_plus(m), 6)) ==
            r.psi_plain);
    }
  }
  const auto lor = democracy_table(SpaceSpec::parse("lorentz:w=harmonic:dim=6"), 6);
  for (const auto& r : lor.rows) CHECK(r.phi / r.psi == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("super-democracy constant examples") {
  for (const char* text : {"lp:p=1:dim=6", "lp:p=2:dim=6", "lp:p=inf:dim=6"}) {
    CHECK(superdemocracy_constant(SpaceSpec::parse(text), 6).value == doctest::Approx(1.0));
  }
  const auto lor = SpaceSpec::parse("lorentz:w=harmonic:dim=8");
  CHECK(superdemocracy_constant(lor, 6).value == doctest::Approx(1.0).epsilon(1e-15));

  const auto sum = SpaceSpec::summing(12);
  const auto csd = superdemocracy_constant(sum, 12);
  CHECK(csd.value == 12.0);
  CHECK(csd.kind == EstimateKind::enumerated_exact);
  CHECK(reevaluate(sum, csd, {}) == csd.value);

  const auto table = democracy_table(SpaceSpec::summing(6), 6);
  const auto cd = democracy_constant(SpaceSpec::summing(6), table);
  CHECK(cd.kind == EstimateKind::enumerated_exact);
  CHECK(reevaluate(SpaceSpec::summing(6), cd, {}) == cd.value);
}

TEST_CASE("candidate families") {
  const auto alt = alternating_family(12);
  CHECK(alt.size() == 12);
  CHECK(alt.back().x[10] == doctest::Approx(1.0));
  const auto gadgets = gadget_family(SpaceSpec::summing(8), {0.1, 0.001});
  CHECK(gadgets.size() == 4 * 2 * 2);
  for (const auto& g : gadgets) CHECK(g.designed_m.has_value());
  const auto a = random_candidate(8, 5, 3);
  const auto b = random_candidate(8, 5, 3);
  CHECK(a.x == b.x);
  CHECK(random_candidate(8, 5, 1).x.support().size() == 1);
}

TEST_CASE("quasi-greedy estimate examples") {
  const auto lp2 = SpaceSpec::parse("lp:p=2:dim=8");
  CHECK(quasi_ratio(lp2, CoefficientVector(std::vector<double>(8, 1.0)), 1) ==
        doctest::Approx(std::sqrt(7.0 / 8.0)));
  CHECK(quasi_greedy_estimate(lp2, estimator(lp2, 50)).value >= 0.93);
  const auto sum = SpaceSpec::summing(12);
  CHECK(quasi_greedy_estimate(sum, estimator(sum, 20)).value >= 5.0);
  const auto lp1 = SpaceSpec::parse("lp:p=1:dim=8");
  const auto q1 = quasi_greedy_estimate(lp1, estimator(lp1, 100));
  CHECK(q1.value > 0.8);
  CHECK(q1.value <= 1.0 + 1e-12);
}

TEST_CASE("almost-greedy estimate examples") {
  const auto lp2 = SpaceSpec::parse("lp:p=2:dim=8");
  CHECK(std::abs(almost_greedy_estimate(lp2, estimator(lp2, 50)).value - 1.0) <= 1e-9);
  const auto sum = SpaceSpec::summing(12);
  CHECK(almost_greedy_estimate(sum, estimator(sum, 10)).value >= 4.0);
  const auto lor = SpaceSpec::parse("lorentz:w=harmonic:dim=8");
  CHECK(almost_greedy_estimate(lor, estimator(lor, 500)).value <= 3.0);
}

TEST_CASE("semi-greedy estimate examples") {
  const auto lp2 = SpaceSpec::parse("lp:p=2:dim=6");
  CHECK(std::abs(semi_greedy_estimate(lp2, estimator(lp2, 50)).value - 1.0) <= 1e-9);
  const auto sum = SpaceSpec::summing(12);
  CHECK(semi_greedy_estimate(sum, estimator(sum, 4)).value >= std::sqrt(3.0) - 0.05);
  const auto linf = SpaceSpec::parse("lp:p=inf:dim=6");
  CHECK(semi_greedy_estimate(linf, estimator(linf, 500)).value <= 2.0);
}

TEST_CASE("sampled estimates are monotone in the budget and re-evaluate from witnesses") {
  const auto s = SpaceSpec::summing(6);
  const auto solver = default_chebyshev_options(s, 1);
  using Fn = ConstantEstimate (*)(const SpaceSpec&, const EstimatorOptions&);
  for (Fn fn : {Fn(quasi_greedy_estimate), Fn(almost_greedy_estimate), Fn(semi_greedy_estimate)}) {
    double previous = 0.0;
    for (std::size_t budget : {1u, 5u, 20u, 60u}) {
      const auto est = fn(s, estimator(s, budget, 9));
      CHECK(est.kind == EstimateKind::sampled_lower_bound);
      CHECK(est.value >= previous);
      previous = est.value;
      CHECK(std::abs(reevaluate(s, est, solver) - est.value) <= 1e-9);
    }
  }
  CHECK_THROWS(quasi_greedy_estimate(s, estimator(s, 0)));
}

TEST_CASE("witness sets serialize 1-based") {
  CHECK(set_to_json({0, 4}).dump() == "[1,5]");
  CHECK(set_from_json(nlohmann::json::parse("[2,3]")) == IndexSet{1, 2});
  CHECK_THROWS(set_from_json(nlohmann::json::parse("[0]")));
}
