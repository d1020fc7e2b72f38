#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "greedylab/spaces.hpp"

namespace greedylab {

enum class SolverMethod {
  /// Exact path when the norm admits one, coordinate descent otherwise.
  automatic,
  /// Always use multi-start coordinate descent.
  coordinate_descent,
};

enum class SolverPath {
  /// Lattice norms: keeping x on the support is optimal.
  lattice_projection,
  /// Summing norm: each free coordinate re-centres one segment of the
  /// prefix-sum path.
  summing_segments,
  coordinate_descent,
};

std::string_view to_string(SolverPath path);

struct ChebyshevCertificate {
  /// ||x - P_A(x)||, the value of the trivial feasible candidate.
  double plain_greedy_value = 0.0;
  std::size_t probe_count = 0;
  /// Largest decrease any probe achieved below the returned value (>= 0).
  double max_probe_improvement = 0.0;
};

/// Best approximation of x from span{e_i : i in support}.
struct ChebyshevSolution {
  IndexSet support;
  std::vector<double> coefficients;  // one per support element
  double value = 0.0;                // ||x - sum a_i e_i||, re-evaluated
  ChebyshevCertificate certificate;
  SolverPath path = SolverPath::coordinate_descent;
  std::size_t iterations = 0;  // line searches spent by coordinate descent
};

/// Running tally of every solve that reports to it; lets suites prove that
/// no uncertified solve slipped through.
struct SolverAudit {
  std::size_t solves = 0;
  std::size_t certified = 0;
  std::size_t failures = 0;
  double worst_probe_improvement = 0.0;
  double worst_excess_over_plain = -std::numeric_limits<double>::infinity();
  /// max |value - ||P_{A^c} x|| | over lp(2) solves.
  double worst_hilbert_gap = 0.0;

  void record(const SpaceSpec& space, const ChebyshevSolution& solution, bool certified_ok);
  void merge(const SolverAudit& other);
};

struct ChebyshevOptions {
  double tol = 1e-6;
  double tol_cert = 1e-6;
  int restarts = 8;
  std::size_t iteration_budget = 100'000;
  std::uint64_t seed = 0;
  SolverMethod method = SolverMethod::automatic;
  SolverAudit* audit = nullptr;
};

/// Defaults for a space: tol 1e-9 on lp(2), 1e-6 elsewhere.
ChebyshevOptions default_chebyshev_options(const SpaceSpec& space, std::uint64_t seed = 0);

/// Raised when the iteration budget runs out before the probe certificate
/// holds. Carries the best point found.
class ChebyshevFailure : public std::runtime_error {
 public:
  ChebyshevFailure(const std::string& what, ChebyshevSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const ChebyshevSolution& best() const noexcept { return best_; }

 private:
  ChebyshevSolution best_;
};

ChebyshevSolution chebyshev_project(const SpaceSpec& space, const CoefficientVector& x,
                                    const IndexSet& support, const ChebyshevOptions& options = {});

/// CG_m(x): chebyshev_project on the greedy set A_m(x).
ChebyshevSolution chebyshev_greedy_sum(const SpaceSpec& space, const CoefficientVector& x,
                                       std::size_t m, const ChebyshevOptions& options = {});

/// x - sum_{i in support} a_i e_i.
CoefficientVector chebyshev_residual(const CoefficientVector& x, const ChebyshevSolution& solution);

}  // namespace greedylab
