#include "greedylab/chebyshev.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "greedylab/greedy.hpp"
#include "greedylab/sampling.hpp"

namespace greedylab {

std::string_view to_string(SolverPath path) {
  switch (path) {
    case SolverPath::lattice_projection: return "lattice-projection";
    case SolverPath::summing_segments: return "summing-segments";
    case SolverPath::coordinate_descent: return "coordinate-descent";
  }
  return "unknown";
}

void SolverAudit::record(const SpaceSpec& space, const ChebyshevSolution& solution,
                         bool certified_ok) {
  ++solves;
  if (certified_ok) ++certified;
  worst_probe_improvement =
      std::max(worst_probe_improvement, solution.certificate.max_probe_improvement);
  worst_excess_over_plain =
      std::max(worst_excess_over_plain, solution.value - solution.certificate.plain_greedy_value);
  if (space.kind() == NormKind::lp && !space.exponent().is_infinite() &&
      space.exponent().value() == 2.0) {
    // closed form: ||P_{A^c} x|| is exactly plain_greedy_value
    worst_hilbert_gap = std::max(
        worst_hilbert_gap, std::abs(solution.value - solution.certificate.plain_greedy_value));
  }
}

void SolverAudit::merge(const SolverAudit& other) {
  solves += other.solves;
  certified += other.certified;
  failures += other.failures;
  worst_probe_improvement = std::max(worst_probe_improvement, other.worst_probe_improvement);
  worst_excess_over_plain = std::max(worst_excess_over_plain, other.worst_excess_over_plain);
  worst_hilbert_gap = std::max(worst_hilbert_gap, other.worst_hilbert_gap);
}

ChebyshevOptions default_chebyshev_options(const SpaceSpec& space, std::uint64_t seed) {
  ChebyshevOptions options;
  options.seed = seed;
  if (space.kind() == NormKind::lp && !space.exponent().is_infinite() &&
      space.exponent().value() == 2.0) {
    options.tol = 1e-9;
  }
  return options;
}

CoefficientVector chebyshev_residual(const CoefficientVector& x, const ChebyshevSolution& solution) {
  std::vector<double> r = x.vector();
  for (std::size_t k = 0; k < solution.support.size(); ++k) {
    r[solution.support[k]] -= solution.coefficients[k];
  }
  return CoefficientVector(std::move(r));
}

namespace {

/// f(a) = ||x - sum_k a_k e_{A_k}||.
class ResidualObjective {
 public:
  ResidualObjective(const SpaceSpec& space, const CoefficientVector& x, const IndexSet& support)
      : space_(space), x_(x.vector()), support_(support), scratch_(x_.size()) {}

  double operator()(const std::vector<double>& a) const {
    scratch_ = x_;
    for (std::size_t k = 0; k < support_.size(); ++k) scratch_[support_[k]] -= a[k];
    return space_.norm(scratch_);
  }

  /// f(a + t d).
  double along(const std::vector<double>& a, const std::vector<double>& d, double t) const {
    scratch_ = x_;
    for (std::size_t k = 0; k < support_.size(); ++k) scratch_[support_[k]] -= a[k] + t * d[k];
    return space_.norm(scratch_);
  }

  std::size_t size() const noexcept { return support_.size(); }

 private:
  const SpaceSpec& space_;
  const std::vector<double>& x_;
  const IndexSet& support_;
  mutable std::vector<double> scratch_;
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double t : v) m = std::max(m, std::abs(t));
  return m;
}

std::vector<double> unit_direction(Rng& rng, std::size_t n) {
  auto d = gaussian_vector(rng, n);
  double s = 0.0;
  for (double t : d) s += t * t;
  s = std::sqrt(s);
  if (s == 0.0) {
    d.assign(n, 0.0);
    d[0] = 1.0;
    return d;
  }
  for (double& t : d) t /= s;
  return d;
}

constexpr std::array<double, 3> kProbeSteps{1e-2, 1e-4, 1e-6};

ChebyshevCertificate certify(const ResidualObjective& f, const std::vector<double>& a, double value,
                             double plain, double scale, int random_directions, Rng& rng) {
  ChebyshevCertificate cert;
  cert.plain_greedy_value = plain;
  double best_probe = value;
  std::vector<double> d(f.size(), 0.0);
  auto probe = [&](const std::vector<double>& dir, double h) {
    for (double t : {h, -h}) {
      best_probe = std::min(best_probe, f.along(a, dir, t));
      ++cert.probe_count;
    }
  };
  for (std::size_t i = 0; i < f.size(); ++i) {
    d.assign(f.size(), 0.0);
    d[i] = 1.0;
    for (double h : kProbeSteps) probe(d, h * scale);
  }
  if (f.size() > 0) {
    for (int r = 0; r < random_directions; ++r) {
      const auto dir = unit_direction(rng, f.size());
      for (double h : kProbeSteps) probe(dir, h * scale);
    }
  }
  cert.max_probe_improvement = std::max(0.0, value - best_probe);
  return cert;
}

/// Minimizes the convex function t -> f(a + t d) by bracketing and golden
/// section. Returns the step and value; t = 0 if nothing beats f0.
std::pair<double, double> line_minimize(const ResidualObjective& f, const std::vector<double>& a,
                                        const std::vector<double>& d, double f0, double step) {
  auto g = [&](double t) { return f.along(a, d, t); };
  double lo = -step;
  double hi = step;
  const double fp = g(step);
  const double fm = fp < f0 ? f0 : g(-step);
  if (fp < f0 || fm < f0) {
    const double sign = fp < f0 ? 1.0 : -1.0;
    double prev = 0.0;
    double cur = step;
    double fcur = fp < f0 ? fp : fm;
    while (cur < 1e15 * step) {
      const double next = 2.0 * cur;
      const double fnext = g(sign * next);
      if (fnext >= fcur) {
        lo = sign * prev;
        hi = sign * next;
        break;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
    }
    if (lo > hi) std::swap(lo, hi);
  }
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double e = lo + kInvPhi * (hi - lo);
  double fc = g(c);
  double fe = g(e);
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (fc <= fe) {
      hi = e;
      e = c;
      fe = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = g(c);
    } else {
      lo = c;
      c = e;
      fc = fe;
      e = lo + kInvPhi * (hi - lo);
      fe = g(e);
    }
  }
  const double t = fc <= fe ? c : e;
  const double ft = std::min(fc, fe);
  if (ft < f0) return {t, ft};
  return {0.0, f0};
}

struct DescentState {
  std::vector<double> a;
  double value;
};

/// Cyclic coordinate descent, then pairwise and random directions so that
/// kinks of max-type norms do not freeze the iteration. Stops after a full
/// sweep without progress or when the budget runs out.
void descend(const ResidualObjective& f, DescentState& state, double scale, std::size_t& budget,
             std::size_t& used, Rng& rng) {
  const std::size_t k = f.size();
  std::vector<double> d(k, 0.0);
  auto try_direction = [&](const std::vector<double>& dir) {
    if (budget == 0) return false;
    --budget;
    ++used;
    const double step = std::max(1e-3 * scale, 1e-3 * state.value);
    const auto [t, ft] = line_minimize(f, state.a, dir, state.value, step);
    if (ft < state.value) {
      for (std::size_t i = 0; i < k; ++i) state.a[i] += t * dir[i];
      const double before = state.value;
      state.value = f(state.a);
      return before - state.value > 1e-15 * std::max(1.0, before);
    }
    return false;
  };
  while (budget > 0) {
    bool progress = false;
    for (std::size_t i = 0; i < k; ++i) {
      d.assign(k, 0.0);
      d[i] = 1.0;
      progress |= try_direction(d);
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        for (double s : {1.0, -1.0}) {
          d.assign(k, 0.0);
          d[i] = 1.0;
          d[j] = s;
          progress |= try_direction(d);
        }
      }
    }
    for (std::size_t r = 0; r < k; ++r) progress |= try_direction(unit_direction(rng, k));
    if (!progress) return;
  }
}

std::vector<double> lattice_coefficients(const CoefficientVector& x, const IndexSet& support) {
  std::vector<double> a(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) a[k] = x[support[k]];
  return a;
}

/// For the summing norm the prefix sum at a free coordinate can be set at
/// will, so between consecutive free coordinates the path is a fixed shape
/// with a free offset; the optimal offset centres it.
std::vector<double> summing_coefficients(const CoefficientVector& x, const IndexSet& support) {
  const std::size_t n = x.dim();
  std::vector<double> a(support.size());
  double prefix = 0.0;  // prefix sum of the residual up to the previous coordinate
  std::size_t pos = 0;
  while (pos < n && (support.empty() || pos < support.front())) prefix += x[pos++];
  for (std::size_t j = 0; j < support.size(); ++j) {
    const std::size_t k = support[j];
    const std::size_t end = j + 1 < support.size() ? support[j + 1] : n;
    double rel = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = k + 1; i < end; ++i) {
      rel += x[i];
      lo = std::min(lo, rel);
      hi = std::max(hi, rel);
    }
    const double level = -0.5 * (lo + hi);
    const double residual_k = level - prefix;
    a[j] = x[k] - residual_k;
    prefix = level + rel;
  }
  return a;
}

}  // namespace

ChebyshevSolution chebyshev_project(const SpaceSpec& space, const CoefficientVector& x,
                                    const IndexSet& support, const ChebyshevOptions& options) {
  if (x.dim() != space.dim()) {
    throw DimensionError("dimension mismatch: vector has dim " + std::to_string(x.dim()) +
                         ", space has dim " + std::to_string(space.dim()));
  }
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= x.dim() || (k > 0 && support[k] <= support[k - 1])) {
      throw std::out_of_range("support must be a sorted subset of 1.." + std::to_string(x.dim()));
    }
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be > 0");

  const ResidualObjective f(space, x, support);
  const auto plain_coeffs = lattice_coefficients(x, support);
  const double plain = f(plain_coeffs);
  const double scale = std::max(1.0, max_abs(x.values()));
  Rng rng(options.seed);

  ChebyshevSolution solution;
  solution.support = support;

  const bool use_exact = options.method == SolverMethod::automatic;
  if (use_exact && space.is_lattice()) {
    solution.path = SolverPath::lattice_projection;
    solution.coefficients = plain_coeffs;
  } else if (use_exact && space.kind() == NormKind::summing) {
    solution.path = SolverPath::summing_segments;
    solution.coefficients = summing_coefficients(x, support);
  } else {
    solution.path = SolverPath::coordinate_descent;
    std::size_t budget = options.iteration_budget;
    DescentState best{plain_coeffs, plain};
    const int starts = std::max(options.restarts, 1);
    for (int s = 0; s < starts && budget > 0 && !support.empty(); ++s) {
      DescentState state{plain_coeffs, plain};
      if (s == 1) state.a.assign(support.size(), 0.0);
      if (s >= 2) {
        const auto noise = gaussian_vector(rng, support.size());
        for (std::size_t k = 0; k < support.size(); ++k) state.a[k] += scale * noise[k];
      }
      state.value = f(state.a);
      descend(f, state, scale, budget, solution.iterations, rng);
      if (state.value < best.value) best = state;
    }
    // re-descend from the best probe while the certificate keeps failing
    for (int round = 0; round < 8 && budget > 0; ++round) {
      Rng probe_rng(mix_seed(options.seed, 1000 + static_cast<std::uint64_t>(round)));
      const auto cert =
          certify(f, best.a, best.value, plain, scale, options.restarts, probe_rng);
      if (cert.max_probe_improvement <= options.tol_cert) break;
      descend(f, best, 1e-3 * scale, budget, solution.iterations, rng);
    }
    solution.coefficients = best.a;
  }

  solution.value = f(solution.coefficients);
  if (solution.value > plain) {
    solution.coefficients = plain_coeffs;
    solution.value = plain;
  }
  Rng probe_rng(mix_seed(options.seed, 999));
  solution.certificate =
      certify(f, solution.coefficients, solution.value, plain, scale, options.restarts, probe_rng);

  const bool ok = solution.certificate.max_probe_improvement <= options.tol_cert &&
                  solution.value <= plain + options.tol;
  if (options.audit) {
    options.audit->record(space, solution, ok);
    if (!ok) ++options.audit->failures;
  }
  if (!ok) {
    throw ChebyshevFailure("Chebyshev solve not certified: probe improvement " +
                               std::to_string(solution.certificate.max_probe_improvement) +
                               " exceeds tolerance after " + std::to_string(solution.iterations) +
                               " line searches",
                           solution);
  }
  return solution;
}

ChebyshevSolution chebyshev_greedy_sum(const SpaceSpec& space, const CoefficientVector& x,
                                       std::size_t m, const ChebyshevOptions& options) {
  return chebyshev_project(space, x, greedy_set(x, m), options);
}

}  // namespace greedylab
