#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "greedylab/chebyshev.hpp"
#include "greedylab/errors.hpp"
#include "greedylab/spaces.hpp"

namespace greedylab {

enum class CheckKind {
  /// Pointwise inequality or identity that must hold on every instance.
  exact,
  /// Depends on a sampled constant; a failure means the estimator was too
  /// weak, not that the inequality is false.
  estimator_dependent,
};

enum class CheckStatus { ok, no_certified_constant };

std::string_view to_string(CheckKind kind);
std::string_view to_string(CheckStatus status);

/// lhs <= rhs + tolerance is the assertion; violation = lhs - rhs.
struct AssertionOutcome {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::exact;

  double violation() const { return lhs - rhs; }
  bool failed() const { return violation() > tolerance; }
};

struct AssertionStats {
  std::string id;
  CheckKind kind = CheckKind::exact;
  double tolerance = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_failures = 0;
  double max_violation = -std::numeric_limits<double>::infinity();
  nlohmann::json worst_instance;
};

struct CheckReport {
  std::string check_id;
  std::string space;
  CheckStatus status = CheckStatus::ok;
  CheckKind kind = CheckKind::exact;
  std::size_t n_instances = 0;
  /// Instances with at least one assertion beyond its tolerance.
  std::size_t n_failures = 0;
  /// Instances whose Chebyshev solve could not be certified; never counted
  /// as violations.
  std::size_t solver_failures = 0;
  double max_violation = -std::numeric_limits<double>::infinity();
  /// {"assertion": id, "instance": {...}} realizing max_violation.
  nlohmann::json worst_witness;
  std::vector<AssertionStats> assertions;
  nlohmann::json details = nlohmann::json::object();

  bool passed() const {
    return status != CheckStatus::ok || (n_failures == 0 && solver_failures == 0);
  }
  const AssertionStats* assertion(std::string_view id) const;
};

nlohmann::json to_json(const CheckReport& report);

struct VerifyOptions {
  std::size_t budget = 300;
  std::uint64_t seed = 0;
  std::vector<double> delta_grid{1e-1, 1e-3, 1e-6};
  /// Truncation levels as fractions of max_i |x_i|.
  std::vector<double> alpha_grid{0.1, 0.3, 0.5, 0.7, 0.9};
  /// Sample budget of the estimators inside theorem-bounds.
  std::size_t estimator_budget = 40;
  ChebyshevOptions solver{};
};

/// Solver options for `space` carrying the caller's seed and audit sink.
ChebyshevOptions solver_options_for(const SpaceSpec& space, const VerifyOptions& options);

/// Auxiliary vector from the proof that quasi-greedy plus super-democratic
/// implies semi-greedy:
///   w = sum_{i in A_m(x)} T_alpha(y_i) e_i + P_{A_m(x)^c}(x),  y = x - z,
///   alpha = max_{j not in A_m(x)} |x_j|.
struct WitnessW {
  CoefficientVector x;
  CoefficientVector z;
  std::size_t m;
  IndexSet b_set;  // supp z
  IndexSet greedy;  // A_m(x)
  double alpha;
  CoefficientVector y;
  CoefficientVector w;
  IndexSet gamma;  // greedy set of y of size |B \ A_m(x)|
};

/// Throws std::invalid_argument when alpha = 0 (x is m-sparse).
WitnessW build_witness_w(const CoefficientVector& x, const CoefficientVector& z, std::size_t m);

CheckReport check_convexity_corollary(const SpaceSpec& space, const VerifyOptions& options);
CheckReport check_truncation_bound(const SpaceSpec& space, const VerifyOptions& options);
CheckReport check_min_coeff_bound(const SpaceSpec& space, const VerifyOptions& options);
CheckReport witness_w_suite(const SpaceSpec& space, const VerifyOptions& options);

/// Fixed A, B and signs, one instance per delta in the grid.
CheckReport gadget_superdemocracy_suite(const SpaceSpec& space, const IndexSet& a_set,
                                        const SignPattern& a_signs, const IndexSet& b_set,
                                        const SignPattern& b_signs, const VerifyOptions& options);
/// Random A, B and signs fitting before a fresh block; budget x |delta grid|.
CheckReport gadget_superdemocracy_sampled(const SpaceSpec& space, const VerifyOptions& options);
CheckReport gadget_quasigreedy_suite(const SpaceSpec& space, const VerifyOptions& options);

/// Direct check ||x - CG_m x|| <= (C_q + 4 C_q C_sd) sigma_m(x) where C_q is
/// certified and C_sd enumerated.
CheckReport theorem_direct_bound(const SpaceSpec& space, const VerifyOptions& options);

/// From C_sd enumerated on the first `prefix` coordinates with sizes up to
/// `max_size`, the converse bound C_sd <= 2 (C_s K_b)^2 forces
/// C_s >= sqrt(C_sd / 2) / K_b. Checks that the gadget-driven semi-greedy
/// estimate reaches 95% of that. prefix = 0 means the whole space.
CheckReport converse_bound_check(const SpaceSpec& space, std::size_t prefix, std::size_t max_size,
                                 const VerifyOptions& options);

struct ClassificationRow {
  std::string family;  // canonical spec without dim
  std::vector<std::size_t> dims;
  std::vector<double> almost;
  std::vector<double> semi;
  std::string almost_verdict;  // "bounded" or "growing"
  std::string semi_verdict;
};

/// "growing" iff the estimate at the largest dimension is at least this
/// factor above the estimate at the smallest one.
inline constexpr double kGrowthFactor = 1.5;

std::string growth_verdict(const std::vector<double>& trajectory);

ClassificationRow classify_family(const SpaceSpec& space, const std::vector<std::size_t>& dims,
                                  const VerifyOptions& options);

struct TheoremBoundsResult {
  std::vector<CheckReport> reports;
  CheckReport classification;
  std::vector<ClassificationRow> rows;
};

/// Direct bound and converse consistency per space, then the almost-greedy
/// vs semi-greedy classification over `dims`.
TheoremBoundsResult theorem_bounds_suite(const std::vector<SpaceSpec>& spaces,
                                         const VerifyOptions& options,
                                         const std::vector<std::size_t>& dims = {4, 5, 6, 7, 8, 9,
                                                                                 10, 11, 12});

/// Re-evaluates the assertion named in a report's worst witness and returns
/// its violation.
double replay_witness(const SpaceSpec& space, const std::string& check_id,
                      const nlohmann::json& witness, const VerifyOptions& options);

}  // namespace greedylab
