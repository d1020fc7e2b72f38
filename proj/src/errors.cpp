#include "greedylab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "greedylab/gadgets.hpp"
#include "greedylab/greedy.hpp"
#include "greedylab/sampling.hpp"

namespace greedylab {

namespace {

constexpr double kRatioGuard = 1e-12;
constexpr double kAlternatingBump = 1e-3;

double norm_off(const SpaceSpec& space, const CoefficientVector& x, const IndexSet& set,
                std::vector<double>& scratch) {
  scratch = x.vector();
  for (std::size_t i : set) scratch[i] = 0.0;
  return space.norm(scratch);
}

double greedy_error(const SpaceSpec& space, const CoefficientVector& x, std::size_t m) {
  std::vector<double> scratch;
  return norm_off(space, x, greedy_set(x, m), scratch);
}

}  // namespace

nlohmann::json set_to_json(const IndexSet& set) {
  auto j = nlohmann::json::array();
  for (std::size_t i : set) j.push_back(i + 1);
  return j;
}

IndexSet set_from_json(const nlohmann::json& j) {
  IndexSet set;
  for (const auto& v : j) {
    const auto i = v.get<std::size_t>();
    if (i == 0) throw std::invalid_argument("witness sets are 1-based");
    set.push_back(i - 1);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Error functionals

BestApproximation sigma_m(const SpaceSpec& space, const CoefficientVector& x, std::size_t m,
                          const ChebyshevOptions& options) {
  if (m > x.dim()) throw std::out_of_range("m exceeds dim");
  require_subset_cap(x.dim(), m);
  BestApproximation best{std::numeric_limits<double>::infinity(), {}, {}};
  for_each_combination(x.dim(), m, [&](const IndexSet& support) {
    const auto sol = chebyshev_project(space, x, support, options);
    if (sol.value < best.value) best = {sol.value, support, sol.coefficients};
  });
  return best;
}

BestApproximation sigma_tilde_m(const SpaceSpec& space, const CoefficientVector& x, std::size_t m) {
  if (m > x.dim()) throw std::out_of_range("m exceeds dim");
  require_subset_cap(x.dim(), m);
  BestApproximation best{std::numeric_limits<double>::infinity(), {}, {}};
  std::vector<double> scratch;
  for_each_combination(x.dim(), m, [&](const IndexSet& set) {
    const double v = norm_off(space, x, set, scratch);
    if (v < best.value) best = {v, set, {}};
  });
  return best;
}

ErrorCurve error_curve(const SpaceSpec& space, const CoefficientVector& x, std::size_t max_m,
                       const ChebyshevOptions& options) {
  if (max_m > x.dim()) throw std::out_of_range("max_m exceeds dim");
  for (std::size_t m = 0; m <= max_m; ++m) require_subset_cap(x.dim(), m);
  ErrorCurve curve;
  for (std::size_t m = 0; m <= max_m; ++m) {
    ErrorCurveRow row;
    row.m = m;
    row.sigma = sigma_m(space, x, m, options).value;
    row.sigma_tilde = sigma_tilde_m(space, x, m).value;
    row.greedy_err = greedy_error(space, x, m);
    row.cheb_err = chebyshev_greedy_sum(space, x, m, options).value;
    curve.rows.push_back(row);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Democracy functions

DemocracyRow democracy_row(const SpaceSpec& space, std::size_t m, std::size_t prefix) {
  if (m == 0 || m > prefix || prefix > space.dim()) {
    throw std::out_of_range("democracy row needs 1 <= m <= prefix <= dim");
  }
  require_subset_cap(prefix, m);
  require_sign_cap(m);
  DemocracyRow row;
  row.m = m;
  row.phi = row.phi_plain = -1.0;
  row.psi = row.psi_plain = std::numeric_limits<double>::infinity();
  std::vector<double> v(space.dim(), 0.0);
  std::vector<int> signs(m);
  const std::uint64_t patterns = std::uint64_t{1} << m;
  for_each_combination(prefix, m, [&](const IndexSet& set) {
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      for (std::size_t j = 0; j < m; ++j) {
        signs[j] = (mask >> j) & 1U ? -1 : 1;
        v[set[j]] = signs[j];
      }
      const double value = space.norm(v);
      if (value > row.phi) {
        row.phi = value;
        row.argmax_set = set;
        row.argmax_signs = SignPattern(signs);
      }
      if (value < row.psi) {
        row.psi = value;
        row.argmin_set = set;
        row.argmin_signs = SignPattern(signs);
      }
      if (mask == 0) {
        if (value > row.phi_plain) {
          row.phi_plain = value;
          row.argmax_plain_set = set;
        }
        if (value < row.psi_plain) {
          row.psi_plain = value;
          row.argmin_plain_set = set;
        }
      }
    }
    for (std::size_t i : set) v[i] = 0.0;
  });
  return row;
}

DemocracyTable democracy_table(const SpaceSpec& space, std::size_t max_m, std::size_t prefix) {
  if (prefix == 0) prefix = space.dim();
  if (max_m > prefix) throw std::out_of_range("max_m exceeds the enumerated coordinates");
  for (std::size_t m = 1; m <= max_m; ++m) {
    require_subset_cap(prefix, m);
    require_sign_cap(m);
  }
  DemocracyTable table;
  table.prefix = prefix;
  for (std::size_t m = 1; m <= max_m; ++m) table.rows.push_back(democracy_row(space, m, prefix));
  return table;
}

namespace {

ConstantEstimate ratio_constant(const SpaceSpec& space, const DemocracyTable& table, bool plain) {
  ConstantEstimate est{plain ? "C_d" : "C_sd", 0.0, EstimateKind::enumerated_exact, {}};
  for (std::size_t a = 1; a <= table.max_m(); ++a) {
    for (std::size_t b = a; b <= table.max_m(); ++b) {
      const auto& ra = table.at(a);
      const auto& rb = table.at(b);
      const double num = plain ? ra.phi_plain : ra.phi;
      const double den = plain ? rb.psi_plain : rb.psi;
      if (!(den > 0.0)) {
        throw std::logic_error("psi(" + std::to_string(b) + ") = 0 in " + space.canonical() +
                               ": semi-normalization violated");
      }
      const double ratio = num / den;
      if (ratio > est.value) {
        est.value = ratio;
        const auto a_signs = plain ? SignPattern::all_plus(a) : ra.argmax_signs;
        const auto b_signs = plain ? SignPattern::all_plus(b) : rb.argmin_signs;
        est.witness = {{"a", a},
                       {"b", b},
                       {"A", set_to_json(plain ? ra.argmax_plain_set : ra.argmax_set)},
                       {"eps", a_signs.signs()},
                       {"B", set_to_json(plain ? rb.argmin_plain_set : rb.argmin_set)},
                       {"eta", b_signs.signs()},
                       {"prefix", table.prefix}};
      }
    }
  }
  return est;
}

}  // namespace

ConstantEstimate superdemocracy_constant(const SpaceSpec& space, const DemocracyTable& table) {
  return ratio_constant(space, table, false);
}

ConstantEstimate superdemocracy_constant(const SpaceSpec& space, std::size_t max_m) {
  return superdemocracy_constant(space, democracy_table(space, max_m));
}

ConstantEstimate democracy_constant(const SpaceSpec& space, const DemocracyTable& table) {
  return ratio_constant(space, table, true);
}

// ---------------------------------------------------------------------------
// Candidate families

std::vector<Candidate> alternating_family(std::size_t dim) {
  std::vector<Candidate> out;
  for (std::size_t k = 1; 2 * k <= dim; ++k) {
    for (int bumped_class : {0, 1}) {
      std::vector<double> x(dim, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        x[2 * j] = 1.0 + (bumped_class == 0 ? kAlternatingBump : 0.0);
        x[2 * j + 1] = -1.0 - (bumped_class == 1 ? kAlternatingBump : 0.0);
      }
      out.push_back({CoefficientVector(std::move(x)), "alternating", std::nullopt});
    }
  }
  return out;
}

std::vector<Candidate> gadget_family(const SpaceSpec& space, const std::vector<double>& delta_grid) {
  std::vector<Candidate> out;
  const std::size_t dim = space.dim();
  for (std::size_t s = 1; 2 * s <= dim; ++s) {
    const std::size_t prefix = dim - s;
    if (binomial(prefix, s) > kMaxSubsetsPerCell || (s < 63 && (1ULL << s) > kMaxSignPatterns)) {
      continue;  // no exact witness for this size; other sizes still apply
    }
    const auto row = democracy_row(space, s, prefix);
    for (double delta : delta_grid) {
      const auto g = make_superdemocracy_gadget(dim, row.argmax_set, row.argmax_signs,
                                                row.argmin_set, row.argmin_signs, delta);
      out.push_back({g.z, "gadget-z", s});
      out.push_back({g.y, "gadget-y", s});
    }
  }
  return out;
}

Candidate random_candidate(std::size_t dim, std::uint64_t seed, std::size_t index) {
  Rng rng(mix_seed(seed, index));
  const std::size_t family = index % 4;
  if (family == 0) return {CoefficientVector(gaussian_vector(rng, dim)), "gaussian", std::nullopt};
  const std::size_t sparsity =
      family == 1 ? 1 : std::max<std::size_t>(1, family == 2 ? dim / 4 : dim / 2);
  std::vector<double> x(dim, 0.0);
  const auto values = gaussian_vector(rng, sparsity);
  const auto support = random_subset(rng, dim, sparsity);
  for (std::size_t k = 0; k < sparsity; ++k) x[support[k]] = values[k];
  return {CoefficientVector(std::move(x)), "sparse-" + std::to_string(sparsity), std::nullopt};
}

// ---------------------------------------------------------------------------
// Ratios

double quasi_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m) {
  const double den = eval_norm(space, x);
  if (den < kRatioGuard) return 0.0;
  return greedy_error(space, x, m) / den;
}

double almost_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m) {
  const double den = sigma_tilde_m(space, x, m).value;
  if (den < kRatioGuard) return 0.0;
  return greedy_error(space, x, m) / den;
}

double semi_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m,
                  const ChebyshevOptions& options) {
  const double den = sigma_m(space, x, m, options).value;
  if (den < kRatioGuard) return 0.0;
  return chebyshev_greedy_sum(space, x, m, options).value / den;
}

namespace {

enum class RatioKind { quasi, almost, semi };

/// Best (m, ratio) over the scanned m for one vector.
struct ScanResult {
  double ratio = 0.0;
  std::size_t m = 0;
};

ScanResult scan(RatioKind kind, const SpaceSpec& space, const CoefficientVector& x,
                const Candidate& cand, std::size_t max_m, const ChebyshevOptions& solver) {
  ScanResult best;
  auto consider = [&](std::size_t m) {
    double r = 0.0;
    switch (kind) {
      case RatioKind::quasi: r = quasi_ratio(space, x, m); break;
      case RatioKind::almost: r = almost_ratio(space, x, m); break;
      case RatioKind::semi: r = semi_ratio(space, x, m, solver); break;
    }
    if (r > best.ratio) best = {r, m};
  };
  if (cand.designed_m) {
    consider(*cand.designed_m);
  } else {
    for (std::size_t m = 0; m <= max_m; ++m) consider(m);
  }
  return best;
}

/// One pass of coordinate ascent on the quasi-greedy ratio.
ScanResult local_ascent(const SpaceSpec& space, std::vector<double>& x, ScanResult current,
                        std::size_t max_m) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return current;
  const Candidate probe{CoefficientVector(x), "", std::nullopt};
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double h : {0.5, 0.1, 0.02}) {
      for (double sgn : {1.0, -1.0}) {
        const double old = x[i];
        x[i] = old + sgn * h * scale;
        const auto r = scan(RatioKind::quasi, space, CoefficientVector(x), probe, max_m, {});
        if (r.ratio > current.ratio) {
          current = r;
        } else {
          x[i] = old;
        }
      }
    }
  }
  return current;
}

ConstantEstimate run_estimator(RatioKind kind, const SpaceSpec& space,
                               const EstimatorOptions& options) {
  static constexpr const char* kNames[] = {"C_q", "C_al", "C_s"};
  if (options.budget == 0) throw std::invalid_argument("sample budget must be >= 1");
  const std::size_t max_m = std::min(options.max_m.value_or(space.dim()), space.dim());
  if (kind != RatioKind::quasi) {
    for (std::size_t m = 0; m <= max_m; ++m) require_subset_cap(space.dim(), m);
  }
  ConstantEstimate est{kNames[static_cast<int>(kind)], 0.0, EstimateKind::sampled_lower_bound, {}};
  std::size_t evaluated = 0;
  auto record = [&](const CoefficientVector& x, const std::string& family, ScanResult r) {
    if (r.ratio > est.value) {
      est.value = r.ratio;
      est.witness = {{"x", x.vector()}, {"m", r.m}, {"family", family}};
      return true;
    }
    return false;
  };

  std::vector<Candidate> structured = alternating_family(space.dim());
  for (auto& g : gadget_family(space, options.delta_grid)) structured.push_back(std::move(g));
  for (const auto& cand : structured) {
    ++evaluated;
    record(cand.x, cand.family, scan(kind, space, cand.x, cand, max_m, options.solver));
  }
  for (std::size_t s = 0; s < options.budget; ++s) {
    const auto cand = random_candidate(space.dim(), options.seed, s);
    ++evaluated;
    const auto r = scan(kind, space, cand.x, cand, max_m, options.solver);
    const bool new_record = record(cand.x, cand.family, r);
    if (kind == RatioKind::quasi && new_record) {
      // ascent from every record holder keeps the estimate monotone in budget
      auto x = cand.x.vector();
      const auto improved = local_ascent(space, x, r, max_m);
      record(CoefficientVector(x), cand.family + "+ascent", improved);
    }
  }
  est.witness["evaluated"] = evaluated;
  return est;
}

}  // namespace

ConstantEstimate quasi_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options) {
  return run_estimator(RatioKind::quasi, space, options);
}

ConstantEstimate almost_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options) {
  return run_estimator(RatioKind::almost, space, options);
}

ConstantEstimate semi_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options) {
  return run_estimator(RatioKind::semi, space, options);
}

double reevaluate(const SpaceSpec& space, const ConstantEstimate& estimate,
                  const ChebyshevOptions& options) {
  const auto& w = estimate.witness;
  switch (estimate.kind) {
    case EstimateKind::unavailable: return std::numeric_limits<double>::quiet_NaN();
    case EstimateKind::certified_exact: return estimate.value;
    default: break;
  }
  if (estimate.name == "C_sd" || estimate.name == "C_d") {
    const auto a = indicator(set_from_json(w.at("A")),
                             SignPattern(w.at("eps").get<std::vector<int>>()), space.dim());
    const auto b = indicator(set_from_json(w.at("B")),
                             SignPattern(w.at("eta").get<std::vector<int>>()), space.dim());
    return eval_norm(space, a) / eval_norm(space, b);
  }
  if (!w.contains("x")) return 0.0;
  const CoefficientVector x(w.at("x").get<std::vector<double>>());
  if (estimate.name == "K_b") {
    return eval_norm(space, partial_sum(x, w.at("n").get<std::size_t>())) / eval_norm(space, x);
  }
  const auto m = w.at("m").get<std::size_t>();
  if (estimate.name == "C_q") return quasi_ratio(space, x, m);
  if (estimate.name == "C_al") return almost_ratio(space, x, m);
  if (estimate.name == "C_s") return semi_ratio(space, x, m, options);
  throw std::invalid_argument("unknown constant '" + estimate.name + "'");
}

}  // namespace greedylab
