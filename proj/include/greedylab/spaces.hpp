#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "greedylab/constants.hpp"
#include "greedylab/enumeration.hpp"

namespace greedylab {

/// Invalid space grammar or parameter value. The message names the
/// offending token.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite real coefficient sequence x = sum_i x_i e_i with dim >= 1.
class CoefficientVector {
 public:
  explicit CoefficientVector(std::vector<double> coeffs);

  static CoefficientVector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const double> values() const noexcept { return coeffs_; }
  const std::vector<double>& vector() const noexcept { return coeffs_; }

  IndexSet support() const;

  bool operator==(const CoefficientVector&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// Real unimodular signs, one per element of the indexed set.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(std::vector<int> signs);

  static SignPattern all_plus(std::size_t n) { return SignPattern(std::vector<int>(n, 1)); }

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<int>& signs() const noexcept { return signs_; }

  bool operator==(const SignPattern&) const = default;

 private:
  std::vector<int> signs_;
};

/// Exponent p in [1, inf]; infinity is a distinct state, not a large float.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() { return Exponent(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }
  double value() const;
  std::string to_string() const;

  bool operator==(const Exponent&) const = default;

 private:
  Exponent(double p, bool infinite) : p_(p), infinite_(infinite) {}
  double p_;
  bool infinite_;
};

enum class NormKind { lp, weighted_lp, summing, lorentz };

std::string_view to_string(NormKind kind);

/// Positive nonincreasing weight sequence, either a named family or an
/// explicit list.
struct WeightFamily {
  std::string name;  // "harmonic", "ones" or "list"
  std::vector<double> values;  // only for "list"

  static WeightFamily harmonic() { return {"harmonic", {}}; }
  static WeightFamily ones() { return {"ones", {}}; }
  static WeightFamily list(std::vector<double> values) { return {"list", std::move(values)}; }

  std::vector<double> materialize(std::size_t dim) const;
  std::string to_string() const;

  bool operator==(const WeightFamily&) const = default;
};

struct CertifiedConstant {
  double value;
  std::string justification;
};

/// A norm on R^dim standing in for the span of the first dim basis vectors.
class SpaceSpec {
 public:
  static SpaceSpec lp(Exponent p, std::size_t dim);
  static SpaceSpec weighted_lp(Exponent p, WeightFamily weights, std::size_t dim);
  static SpaceSpec summing(std::size_t dim);
  static SpaceSpec lorentz(WeightFamily weights, std::size_t dim);

  /// Parses `lp:p=2:dim=8`, `summing:dim=12`, `lorentz:w=harmonic:dim=10`,
  /// `wlp:p=1:w=harmonic:dim=10`. The dimension defaults to 8; a supplied
  /// override replaces whatever the text says.
  static SpaceSpec parse(std::string_view text, std::optional<std::size_t> dim_override = {});

  std::string canonical() const;
  SpaceSpec with_dim(std::size_t dim) const;

  NormKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const Exponent& exponent() const noexcept { return p_; }
  const WeightFamily& weight_family() const noexcept { return weight_family_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Raw norm of a coefficient array of length dim(). No tolerance inside.
  double norm(std::span<const double> x) const;

  /// |y_i| <= |x_i| for all i implies ||y|| <= ||x||.
  bool is_lattice() const noexcept { return kind_ != NormKind::summing; }

  /// Exact [min_n ||e_n||, max_n ||e_n||].
  std::pair<double, double> unit_vector_bounds() const;

  std::optional<CertifiedConstant> certified(std::string_view name) const;

  bool operator==(const SpaceSpec& other) const { return canonical() == other.canonical(); }

 private:
  SpaceSpec(NormKind kind, Exponent p, WeightFamily weights, std::size_t dim);

  NormKind kind_;
  Exponent p_;
  WeightFamily weight_family_;
  std::vector<double> weights_;
  std::size_t dim_;
};

/// Spaces exercised by the suites and listed by `spaces list`.
std::vector<SpaceSpec> builtin_spaces(std::size_t dim);

double eval_norm(const SpaceSpec& space, const CoefficientVector& x);

/// S_n(x): keeps coordinates 0..n-1.
CoefficientVector partial_sum(const CoefficientVector& x, std::size_t n);

/// P_A(x).
CoefficientVector project(const CoefficientVector& x, const IndexSet& set);

/// 1_{eps A} in R^dim.
CoefficientVector indicator(const IndexSet& set, const SignPattern& signs, std::size_t dim);

enum class ConstantMode { certified, sampled };

/// K_b = sup_n ||S_n x|| / ||x||. Certified mode returns the stored value or
/// an `unavailable` estimate; sampled mode returns a witnessed lower bound.
ConstantEstimate basis_constant(const SpaceSpec& space, ConstantMode mode,
                                std::size_t budget = 1, std::uint64_t seed = 0);

/// max_n ||S_n x|| / ||x|| for one vector, with the maximizing n (1-based
/// prefix length) in the witness.
ConstantEstimate basis_ratio(const SpaceSpec& space, const CoefficientVector& x);

}  // namespace greedylab
