#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greedylab/chebyshev.hpp"
#include "greedylab/constants.hpp"
#include "greedylab/spaces.hpp"

namespace greedylab {

struct BestApproximation {
  double value = 0.0;
  IndexSet support;                  // lexicographically smallest minimizer
  std::vector<double> coefficients;  // empty for sigma_tilde
};

/// sigma_m(x): min over |C| = m of the Chebyshev value on C. Exact by
/// enumeration; throws EnumerationCapError above the cap.
BestApproximation sigma_m(const SpaceSpec& space, const CoefficientVector& x, std::size_t m,
                          const ChebyshevOptions& options);

/// sigma~_m(x): min over |A| = m of ||x - P_A(x)||.
BestApproximation sigma_tilde_m(const SpaceSpec& space, const CoefficientVector& x, std::size_t m);

struct ErrorCurveRow {
  std::size_t m = 0;
  double sigma = 0.0;
  double sigma_tilde = 0.0;
  double greedy_err = 0.0;  // ||x - G_m(x)||
  double cheb_err = 0.0;    // ||x - CG_m(x)||
};

struct ErrorCurve {
  std::vector<ErrorCurveRow> rows;  // m = 0..max_m
};

ErrorCurve error_curve(const SpaceSpec& space, const CoefficientVector& x, std::size_t max_m,
                       const ChebyshevOptions& options);

struct DemocracyRow {
  std::size_t m = 0;
  double phi = 0.0;        // sup over |A| = m and signs of ||1_{eps A}||
  double psi = 0.0;        // inf of the same
  double phi_plain = 0.0;  // signs fixed to +1
  double psi_plain = 0.0;
  IndexSet argmax_set;
  SignPattern argmax_signs;
  IndexSet argmin_set;
  SignPattern argmin_signs;
  IndexSet argmax_plain_set;
  IndexSet argmin_plain_set;
};

/// Exact phi/psi tables by enumerating every set inside the first `prefix`
/// coordinates and every real sign pattern. Rows m = 1..max_m.
struct DemocracyTable {
  std::size_t prefix = 0;
  std::vector<DemocracyRow> rows;

  std::size_t max_m() const noexcept { return rows.size(); }
  const DemocracyRow& at(std::size_t m) const { return rows.at(m - 1); }
  /// phi(0) = 0 by convention.
  double phi(std::size_t m) const { return m == 0 ? 0.0 : at(m).phi; }
};

/// prefix = 0 means the whole space.
DemocracyTable democracy_table(const SpaceSpec& space, std::size_t max_m, std::size_t prefix = 0);

DemocracyRow democracy_row(const SpaceSpec& space, std::size_t m, std::size_t prefix);

/// C_sd = max_{1 <= a <= b <= M} phi(a) / psi(b), enumerated-exact.
ConstantEstimate superdemocracy_constant(const SpaceSpec& space, const DemocracyTable& table);
ConstantEstimate superdemocracy_constant(const SpaceSpec& space, std::size_t max_m);

/// C_d = max_{a <= b} phi_plain(a) / psi_plain(b).
ConstantEstimate democracy_constant(const SpaceSpec& space, const DemocracyTable& table);

/// A vector offered to the sampled estimators. `designed_m` pins the ratio
/// to one m (gadgets); otherwise every m = 0..dim is scanned.
struct Candidate {
  CoefficientVector x;
  std::string family;
  std::optional<std::size_t> designed_m;
};

/// Alternating sign vectors (+-)^k with a 1e-3 bump on one sign class,
/// k = 1..dim/2, bump on either class.
std::vector<Candidate> alternating_family(std::size_t dim);

/// Super-democracy gadgets z, y built from democracy witnesses of each
/// size s <= dim/2 restricted to the first dim - s coordinates.
std::vector<Candidate> gadget_family(const SpaceSpec& space, const std::vector<double>& delta_grid);

/// Random sample `index` of the stream for `seed`: standard Gaussian or
/// s-sparse Gaussian with s in {1, dim/4, dim/2}, cycling.
Candidate random_candidate(std::size_t dim, std::uint64_t seed, std::size_t index);

struct EstimatorOptions {
  std::size_t budget = 200;
  std::uint64_t seed = 0;
  std::vector<double> delta_grid{1e-1, 1e-3, 1e-6};
  ChebyshevOptions solver{};
  /// Upper limit on m scanned for non-gadget candidates (default: dim).
  std::optional<std::size_t> max_m;
};

ConstantEstimate quasi_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options);
ConstantEstimate almost_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options);
ConstantEstimate semi_greedy_estimate(const SpaceSpec& space, const EstimatorOptions& options);

/// Ratio defining an estimator, evaluated at one (x, m); 0 when the
/// denominator is below the 1e-12 guard.
double quasi_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m);
double almost_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m);
double semi_ratio(const SpaceSpec& space, const CoefficientVector& x, std::size_t m,
                  const ChebyshevOptions& options);

/// Recomputes an estimate's value from its witness alone.
double reevaluate(const SpaceSpec& space, const ConstantEstimate& estimate,
                  const ChebyshevOptions& options);

/// 1-based JSON array for an IndexSet, and back.
nlohmann::json set_to_json(const IndexSet& set);
IndexSet set_from_json(const nlohmann::json& j);

}  // namespace greedylab
