#include "greedylab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "greedylab/gadgets.hpp"
#include "greedylab/greedy.hpp"
#include "greedylab/sampling.hpp"

namespace greedylab {

using nlohmann::json;

std::string_view to_string(CheckKind kind) {
  return kind == CheckKind::exact ? "exact" : "estimator-dependent";
}

std::string_view to_string(CheckStatus status) {
  return status == CheckStatus::ok ? "ok" : "no certified constant";
}

const AssertionStats* CheckReport::assertion(std::string_view id) const {
  for (const auto& a : assertions) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const CheckReport& report) {
  json assertions = json::array();
  for (const auto& a : report.assertions) {
    assertions.push_back({{"id", a.id},
                          {"kind", to_string(a.kind)},
                          {"tolerance", a.tolerance},
                          {"n_evaluated", a.n_evaluated},
                          {"n_failures", a.n_failures},
                          {"max_violation", finite_or_null(a.max_violation)},
                          {"worst_instance", a.worst_instance}});
  }
  return {{"check_id", report.check_id},
          {"space", report.space},
          {"status", to_string(report.status)},
          {"kind", to_string(report.kind)},
          {"n_instances", report.n_instances},
          {"n_failures", report.n_failures},
          {"solver_failures", report.solver_failures},
          {"max_violation", finite_or_null(report.max_violation)},
          {"worst_witness", report.worst_witness},
          {"assertions", assertions},
          {"details", report.details}};
}

ChebyshevOptions solver_options_for(const SpaceSpec& space, const VerifyOptions& options) {
  auto o = default_chebyshev_options(space, options.seed);
  o.method = options.solver.method;
  o.audit = options.solver.audit;
  return o;
}

namespace {

constexpr double kTight = 1e-12;
constexpr double kComposedTol = 1e-9;
constexpr double kDirectTol = 1e-6;
/// Upper bound on sets x sign patterns spent on one phi table.
constexpr std::size_t kPhiWork = 2'000'000;

CoefficientVector vec_from(const json& j) { return CoefficientVector(j.get<std::vector<double>>()); }
SignPattern signs_from(const json& j) { return SignPattern(j.get<std::vector<int>>()); }

std::size_t set_mismatch(const IndexSet& a, const IndexSet& b) {
  IndexSet diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return diff.size();
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Constants and phi shared by all instances of one suite. Built the same
/// way on replay, so replayed instances see identical numbers.
class Context {
 public:
  Context(SpaceSpec space, const VerifyOptions& options)
      : space_(std::move(space)), solver_(solver_options_for(space_, options)), options_(options) {}

  const SpaceSpec& space() const { return space_; }
  const ChebyshevOptions& solver() const { return solver_; }
  const VerifyOptions& options() const { return options_; }

  std::optional<double> certified(std::string_view name) const {
    const auto c = space_.certified(name);
    return c ? std::optional<double>(c->value) : std::nullopt;
  }

  /// Largest size for which phi is tabulated.
  std::size_t phi_limit() {
    table();
    return table_->max_m();
  }

  double phi(std::size_t m) {
    if (m > phi_limit()) throw std::out_of_range("phi not tabulated at size " + std::to_string(m));
    return table_->phi(m);
  }

  /// Enumerated-exact C_sd, only when phi/psi cover every size.
  std::optional<double> c_sd() {
    if (phi_limit() < space_.dim()) return std::nullopt;
    if (!c_sd_) c_sd_ = superdemocracy_constant(space_, *table_).value;
    return c_sd_;
  }

 private:
  const DemocracyTable& table() {
    if (!table_) {
      std::size_t limit = 0;
      std::size_t work = 0;
      const std::size_t dim = space_.dim();
      for (std::size_t m = 1; m <= dim; ++m) {
        if (binomial(dim, m) > kMaxSubsetsPerCell || m >= 63 || (1ULL << m) > kMaxSignPatterns) {
          break;
        }
        work += binomial(dim, m) << m;
        if (work > kPhiWork) break;
        limit = m;
      }
      table_ = democracy_table(space_, limit);
    }
    return *table_;
  }

  SpaceSpec space_;
  ChebyshevOptions solver_;
  VerifyOptions options_;
  std::optional<DemocracyTable> table_;
  std::optional<double> c_sd_;
};

using Outcomes = std::vector<AssertionOutcome>;
using Evaluator = std::function<Outcomes(Context&, const json&)>;

AssertionOutcome le(std::string id, double lhs, double rhs, double tol,
                    CheckKind kind = CheckKind::exact) {
  return {std::move(id), lhs, rhs, tol, kind};
}

// ---------------------------------------------------------------------------
// Evaluators: instance JSON in, assertion outcomes out.

Outcomes eval_convexity(Context& ctx, const json& inst) {
  const auto set = set_from_json(inst.at("A"));
  const auto z = inst.at("z").get<std::vector<double>>();
  std::vector<double> v(ctx.space().dim(), 0.0);
  double zmax = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    v[set[k]] = z[k];
    zmax = std::max(zmax, std::abs(z[k]));
  }
  return {le("convexity", ctx.space().norm(v), zmax * ctx.phi(set.size()), kTight)};
}

Outcomes eval_truncation(Context& ctx, const json& inst) {
  const auto x = vec_from(inst.at("x"));
  const double alpha = inst.at("alpha").get<double>();
  const double c_q = *ctx.certified("C_q");
  return {le("truncation", eval_norm(ctx.space(), truncate(x, alpha).truncated),
             c_q * eval_norm(ctx.space(), x), kTight)};
}

Outcomes eval_min_coeff(Context& ctx, const json& inst) {
  const auto x = vec_from(inst.at("x"));
  const auto m = inst.at("m").get<std::size_t>();
  const auto set = greedy_set(x, m);
  double min_coeff = std::numeric_limits<double>::infinity();
  std::vector<int> signs;
  for (std::size_t j : set) {
    min_coeff = std::min(min_coeff, std::abs(x[j]));
    signs.push_back(x[j] < 0 ? -1 : 1);
  }
  const double lhs =
      set.empty() ? 0.0
                  : min_coeff * eval_norm(ctx.space(), indicator(set, SignPattern(signs), x.dim()));
  return {le("min-coeff", lhs, 2.0 * *ctx.certified("C_q") * eval_norm(ctx.space(), x), kTight)};
}

}  // namespace

WitnessW build_witness_w(const CoefficientVector& x, const CoefficientVector& z, std::size_t m) {
  if (x.dim() != z.dim()) throw DimensionError("x and z differ in dimension");
  const auto greedy = greedy_set(x, m);
  double alpha = 0.0;
  for (std::size_t j = 0, g = 0; j < x.dim(); ++j) {
    if (g < greedy.size() && greedy[g] == j) {
      ++g;
      continue;
    }
    alpha = std::max(alpha, std::abs(x[j]));
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("x is m-sparse; alpha = 0");
  std::vector<double> y(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] = x[i] - z[i];
  std::vector<double> w = x.vector();
  for (std::size_t i : greedy) w[i] = truncate_scalar(y[i], alpha);
  const auto b_set = z.support();
  const auto k = set_minus(b_set, greedy).size();
  CoefficientVector yv(std::move(y));
  auto gamma = greedy_set(yv, k);
  return {x, z, m, b_set, greedy, alpha, std::move(yv), CoefficientVector(std::move(w)),
          std::move(gamma)};
}

namespace {

Outcomes eval_witness_w(Context& ctx, const json& inst) {
  const auto& space = ctx.space();
  const auto x = vec_from(inst.at("x"));
  const auto z = vec_from(inst.at("z"));
  const auto m = inst.at("m").get<std::size_t>();
  const auto ww = build_witness_w(x, z, m);
  const auto b_minus_a = set_minus(ww.b_set, ww.greedy);
  const auto a_minus_b = set_minus(ww.greedy, ww.b_set);
  const std::size_t k = b_minus_a.size();

  Outcomes out;
  std::size_t off_support = 0;
  for (std::size_t i = 0, g = 0; i < x.dim(); ++i) {
    if (g < ww.greedy.size() && ww.greedy[g] == i) {
      ++g;
      continue;
    }
    if (x[i] - ww.w[i] != 0.0) ++off_support;
  }
  out.push_back(le("supp", static_cast<double>(off_support), 0.0, 0.0));

  const double w_norm = eval_norm(space, ww.w);
  const auto cg = chebyshev_greedy_sum(space, x, m, ctx.solver());
  out.push_back(le("cheb-feasible", cg.value, w_norm, ctx.solver().tol));

  const double t_norm = eval_norm(space, truncate(ww.y, ww.alpha).truncated);
  out.push_back(le("triangle-convexity", w_norm, t_norm + 2.0 * ww.alpha * ctx.phi(k), kTight));

  out.push_back(le("gamma-size",
                   std::abs(static_cast<double>(ww.gamma.size()) - static_cast<double>(k)), 0.0,
                   0.0));
  if (k > 0) {
    double min_ab = std::numeric_limits<double>::infinity();
    for (std::size_t j : a_minus_b) min_ab = std::min(min_ab, std::abs(ww.y[j]));
    double min_gamma = std::numeric_limits<double>::infinity();
    for (std::size_t j : ww.gamma) min_gamma = std::min(min_gamma, std::abs(ww.y[j]));
    out.push_back(le("gamma-min", min_ab, min_gamma, 0.0));
    out.push_back(le("alpha-min", ww.alpha, min_ab, 0.0));
  }

  const auto c_q = ctx.certified("C_q");
  const auto c_sd = c_q ? ctx.c_sd() : std::nullopt;
  if (c_q) {
    const double y_norm = eval_norm(space, ww.y);
    out.push_back(le("f1", t_norm, *c_q * y_norm, kTight));
    if (c_sd) {
      double min_ab = std::numeric_limits<double>::infinity();
      for (std::size_t j : a_minus_b) min_ab = std::min(min_ab, std::abs(ww.y[j]));
      const double lhs = k == 0 ? 0.0 : min_ab * ctx.phi(k);
      out.push_back(le("f3", lhs, 2.0 * *c_q * *c_sd * y_norm, kTight));
      const double factor = *c_q + 4.0 * *c_q * *c_sd;
      out.push_back(le("composed", w_norm, factor * y_norm, kComposedTol));
      const double sigma = sigma_m(space, x, m, ctx.solver()).value;
      out.push_back(le("part-a", cg.value, factor * sigma, kDirectTol));
    }
  }
  return out;
}

Outcomes eval_gadget_sd(Context& ctx, const json& inst) {
  const auto& space = ctx.space();
  const auto a_set = set_from_json(inst.at("A"));
  const auto b_set = set_from_json(inst.at("B"));
  const auto a_signs = signs_from(inst.at("eps"));
  const auto b_signs = signs_from(inst.at("eta"));
  const double delta = inst.at("delta").get<double>();
  const double k_b = *ctx.certified("K_b");
  const auto g = make_superdemocracy_gadget(space.dim(), a_set, a_signs, b_set, b_signs, delta);

  const double one_a = eval_norm(space, indicator(a_set, a_signs, space.dim()));
  const double one_b = eval_norm(space, indicator(b_set, b_signs, space.dim()));
  const double one_d =
      eval_norm(space, indicator(g.d_block, SignPattern::all_plus(g.d_block.size()), space.dim()));
  const double tol = ctx.solver().tol;

  Outcomes out;
  out.push_back(le("greedy-z", static_cast<double>(
                                   set_mismatch(greedy_set(g.z, g.d_block.size()), g.d_block)),
                   0.0, 0.0));
  out.push_back(le("greedy-y",
                   static_cast<double>(set_mismatch(greedy_set(g.y, b_set.size()), b_set)), 0.0,
                   0.0));
  const auto cz = chebyshev_greedy_sum(space, g.z, g.d_block.size(), ctx.solver());
  const auto cy = chebyshev_greedy_sum(space, g.y, b_set.size(), ctx.solver());
  out.push_back(le("prefix-z", one_a, k_b * cz.value, tol));
  out.push_back(le("prefix-y", one_d, 2.0 * k_b * cy.value, tol));
  const double sz = sigma_m(space, g.z, g.d_block.size(), ctx.solver()).value;
  const double sy = sigma_m(space, g.y, b_set.size(), ctx.solver()).value;
  const double r_z = cz.value / sz;
  const double r_y = cy.value / sy;
  const double grow = (1.0 + delta) * (1.0 + delta);
  out.push_back(le("composed", one_a, 2.0 * k_b * k_b * r_z * r_y * grow * one_b, tol));
  return out;
}

Outcomes eval_gadget_qg(Context& ctx, const json& inst) {
  const auto& space = ctx.space();
  const auto x = vec_from(inst.at("x"));
  const auto m = inst.at("m").get<std::size_t>();
  const double delta = inst.at("delta").get<double>();
  const double k_b = *ctx.certified("K_b");
  const auto g = make_quasigreedy_gadget(x, m, delta);
  const double tol = ctx.solver().tol;

  const double tail = eval_norm(space, CoefficientVector([&] {
                                  auto v = x.vector();
                                  for (std::size_t j : g.greedy) v[j] = 0.0;
                                  return v;
                                }()));
  const double one_d =
      eval_norm(space, indicator(g.d_block, SignPattern::all_plus(m), x.dim()));
  const double alpha_d = g.alpha * one_d;

  Outcomes out;
  out.push_back(
      le("greedy-z", static_cast<double>(set_mismatch(greedy_set(g.z, m), g.d_block)), 0.0, 0.0));
  out.push_back(
      le("greedy-y", static_cast<double>(set_mismatch(greedy_set(g.y, m), g.greedy)), 0.0, 0.0));
  const auto cz = chebyshev_greedy_sum(space, g.z, m, ctx.solver());
  const auto cy = chebyshev_greedy_sum(space, g.y, m, ctx.solver());
  out.push_back(le("prefix-z", tail, k_b * cz.value, tol));
  out.push_back(le("prefix-y", alpha_d, 2.0 * k_b * cy.value, tol));
  const double r1 = cz.value / sigma_m(space, g.z, m, ctx.solver()).value;
  const double r2 = cy.value / sigma_m(space, g.y, m, ctx.solver()).value;
  out.push_back(le("composed-z", tail,
                   k_b * r1 * (eval_norm(space, x) + (g.alpha + delta) * one_d), tol));
  out.push_back(le("composed-y", alpha_d, 2.0 * k_b * r2 * eval_norm(space, g.perturbed_x), tol));

  const auto supp = x.support();
  std::size_t mismatched = 0;
  for (std::size_t n : {supp.back() + 1, g.d_block.front()}) {
    const auto direct = greedy_sum(x, m);
    const auto cut = greedy_sum(partial_sum(x, n), m);
    for (std::size_t i = 0; i < x.dim(); ++i) mismatched += direct[i] != cut[i] ? 1 : 0;
  }
  out.push_back(le("tail", static_cast<double>(mismatched), 0.0, 0.0));
  return out;
}

Outcomes eval_direct(Context& ctx, const json& inst) {
  const auto x = vec_from(inst.at("x"));
  const auto m = inst.at("m").get<std::size_t>();
  const double factor = *ctx.certified("C_q") * (1.0 + 4.0 * *ctx.c_sd());
  const double cheb = chebyshev_greedy_sum(ctx.space(), x, m, ctx.solver()).value;
  const double sigma = sigma_m(ctx.space(), x, m, ctx.solver()).value;
  return {le("direct", cheb, factor * sigma, kDirectTol)};
}

Outcomes eval_converse(Context& ctx, const json& inst) {
  const auto x = vec_from(inst.at("x"));
  const auto m = inst.at("m").get<std::size_t>();
  return {le("converse", inst.at("threshold").get<double>(),
             semi_ratio(ctx.space(), x, m, ctx.solver()), 0.0, CheckKind::estimator_dependent)};
}

Outcomes eval_classification(Context& ctx, const json& inst) {
  const auto space = SpaceSpec::parse(inst.at("space").get<std::string>());
  VerifyOptions o = ctx.options();
  o.estimator_budget = inst.at("budget").get<std::size_t>();
  o.seed = inst.at("seed").get<std::uint64_t>();
  const auto row = classify_family(space, inst.at("dims").get<std::vector<std::size_t>>(), o);
  return {le("verdict-agreement", row.almost_verdict == row.semi_verdict ? 0.0 : 1.0, 0.0, 0.0,
             CheckKind::estimator_dependent)};
}

Evaluator evaluator_for(const std::string& check_id) {
  if (check_id == "convexity") return eval_convexity;
  if (check_id == "truncation") return eval_truncation;
  if (check_id == "min-coeff") return eval_min_coeff;
  if (check_id == "witness-w") return eval_witness_w;
  if (check_id == "gadget-superdemocracy") return eval_gadget_sd;
  if (check_id == "gadget-quasigreedy") return eval_gadget_qg;
  if (check_id == "theorem-a") return eval_direct;
  if (check_id == "converse-bound") return eval_converse;
  if (check_id == "classification") return eval_classification;
  throw std::invalid_argument("unknown check id '" + check_id + "'");
}

// ---------------------------------------------------------------------------
// Report assembly

class Runner {
 public:
  Runner(const std::string& check_id, const SpaceSpec& space, const VerifyOptions& options)
      : ctx_(space, options), eval_(evaluator_for(check_id)) {
    report_.check_id = check_id;
    report_.space = space.canonical();
  }

  Context& context() { return ctx_; }

  void run(const json& instance) {
    ++report_.n_instances;
    Outcomes outcomes;
    try {
      outcomes = eval_(ctx_, instance);
    } catch (const ChebyshevFailure&) {
      ++report_.solver_failures;
      return;
    }
    bool failed = false;
    for (const auto& o : outcomes) {
      auto& stats = stats_for(o);
      ++stats.n_evaluated;
      const double v = o.violation();
      if (o.failed()) {
        ++stats.n_failures;
        failed = true;
      }
      if (v > stats.max_violation) {
        stats.max_violation = v;
        stats.worst_instance = instance;
      }
      if (v > report_.max_violation) {
        report_.max_violation = v;
        report_.worst_witness = {{"assertion", o.id}, {"instance", instance}};
      }
      if (o.kind == CheckKind::estimator_dependent) report_.kind = CheckKind::estimator_dependent;
    }
    if (failed) ++report_.n_failures;
  }

  CheckReport finish() { return std::move(report_); }
  CheckReport& report() { return report_; }

 private:
  AssertionStats& stats_for(const AssertionOutcome& o) {
    for (auto& s : report_.assertions) {
      if (s.id == o.id) return s;
    }
    report_.assertions.push_back({o.id, o.kind, o.tolerance, 0, 0,
                                  -std::numeric_limits<double>::infinity(), nullptr});
    return report_.assertions.back();
  }

  Context ctx_;
  Evaluator eval_;
  CheckReport report_;
};

CheckReport gated(const std::string& check_id, const SpaceSpec& space, const std::string& missing) {
  CheckReport r;
  r.check_id = check_id;
  r.space = space.canonical();
  r.status = CheckStatus::no_certified_constant;
  r.details = {{"missing", missing}};
  return r;
}

void require_budget(const VerifyOptions& options) {
  if (options.budget == 0) throw std::invalid_argument("sample budget must be >= 1");
}

/// Gaussian, or Gaussian rounded to multiples of 1/2 (ties), never zero.
std::vector<double> full_support_vector(Rng& rng, std::size_t dim, bool quantized) {
  auto x = gaussian_vector(rng, dim);
  if (quantized) {
    for (double& v : x) {
      v = std::round(2.0 * v) / 2.0;
      if (v == 0.0) v = 0.5;
    }
  }
  return x;
}

}  // namespace

CheckReport check_convexity_corollary(const SpaceSpec& space, const VerifyOptions& options) {
  require_budget(options);
  Runner run("convexity", space, options);
  const std::size_t limit = run.context().phi_limit();
  if (limit == 0) throw EnumerationCapError("phi unavailable at every size");
  for (std::size_t i = 0; i < options.budget; ++i) {
    Rng rng(mix_seed(options.seed, i));
    const std::size_t k = uniform_index(rng, 1, limit);
    const auto set = random_subset(rng, space.dim(), k);
    std::vector<double> z(k);
    if (i % 10 == 0) {
      const auto s = random_signs(rng, k);
      for (std::size_t j = 0; j < k; ++j) z[j] = s[j];
    } else {
      const double c = uniform_real(rng, 0.1, 1.0);
      for (double& v : z) v = c * uniform_real(rng, -1.0, 1.0);
    }
    run.run({{"A", set_to_json(set)}, {"z", z}});
  }
  auto r = run.finish();
  r.details = {{"phi_sizes", limit}};
  return r;
}

CheckReport check_truncation_bound(const SpaceSpec& space, const VerifyOptions& options) {
  if (!space.certified("C_q")) return gated("truncation", space, "C_q");
  require_budget(options);
  Runner run("truncation", space, options);
  for (std::size_t i = 0; i < options.budget; ++i) {
    const auto x = random_candidate(space.dim(), options.seed, i).x;
    double top = 0.0;
    for (double v : x.values()) top = std::max(top, std::abs(v));
    for (double frac : options.alpha_grid) {
      run.run({{"x", x.vector()}, {"alpha", frac * top}});
    }
  }
  return run.finish();
}

CheckReport check_min_coeff_bound(const SpaceSpec& space, const VerifyOptions& options) {
  if (!space.certified("C_q")) return gated("min-coeff", space, "C_q");
  require_budget(options);
  Runner run("min-coeff", space, options);
  for (std::size_t i = 0; i < options.budget; ++i) {
    const auto x = random_candidate(space.dim(), options.seed, i).x;
    for (std::size_t m = 1; m <= space.dim(); ++m) run.run({{"x", x.vector()}, {"m", m}});
  }
  return run.finish();
}

CheckReport witness_w_suite(const SpaceSpec& space, const VerifyOptions& options) {
  require_budget(options);
  if (space.dim() < 2) throw DimensionError("witness-w needs dim >= 2");
  Runner run("witness-w", space, options);
  const std::size_t max_m = std::min(space.dim() - 1, run.context().phi_limit());
  const auto& solver = run.context().solver();
  for (std::size_t i = 0; i < options.budget; ++i) {
    Rng rng(mix_seed(options.seed, i));
    const std::size_t mode = i % 5;
    const auto xs = full_support_vector(rng, space.dim(), mode == 3);
    const CoefficientVector x(xs);
    const std::size_t m = uniform_index(rng, 1, max_m);
    const auto b_set = mode == 4 ? greedy_set(x, m) : random_subset(rng, space.dim(), m);
    std::vector<double> z(space.dim(), 0.0);
    if (mode == 1) {
      try {
        const auto sol = chebyshev_project(space, x, b_set, solver);
        for (std::size_t k = 0; k < b_set.size(); ++k) z[b_set[k]] = sol.coefficients[k];
      } catch (const ChebyshevFailure& f) {
        for (std::size_t k = 0; k < b_set.size(); ++k) z[b_set[k]] = f.best().coefficients[k];
      }
    } else if (mode == 2) {
      const auto g = gaussian_vector(rng, b_set.size());
      for (std::size_t k = 0; k < b_set.size(); ++k) z[b_set[k]] = g[k];
    } else {
      for (std::size_t j : b_set) z[j] = xs[j] + (mode == 3 ? 0.1 * uniform_real(rng, -1, 1) : 0.0);
    }
    run.run({{"x", xs}, {"m", m}, {"z", z}, {"mode", mode}});
  }
  auto r = run.finish();
  r.details = {{"c_q", run.context().certified("C_q") ? json(*run.context().certified("C_q"))
                                                        : json(nullptr)},
               {"c_sd", run.context().c_sd() ? json(*run.context().c_sd()) : json(nullptr)}};
  return r;
}

CheckReport gadget_superdemocracy_suite(const SpaceSpec& space, const IndexSet& a_set,
                                        const SignPattern& a_signs, const IndexSet& b_set,
                                        const SignPattern& b_signs, const VerifyOptions& options) {
  if (!space.certified("K_b")) return gated("gadget-superdemocracy", space, "K_b");
  // geometry errors surface before any instance runs
  make_superdemocracy_gadget(space.dim(), a_set, a_signs, b_set, b_signs, 1.0);
  Runner run("gadget-superdemocracy", space, options);
  json ratios = json::array();
  for (double delta : options.delta_grid) {
    const json inst = {{"A", set_to_json(a_set)}, {"eps", a_signs.signs()},
                       {"B", set_to_json(b_set)}, {"eta", b_signs.signs()},
                       {"delta", delta}};
    run.run(inst);
    const auto g = make_superdemocracy_gadget(space.dim(), a_set, a_signs, b_set, b_signs, delta);
    const auto& solver = run.context().solver();
    try {
      const double r_z = chebyshev_greedy_sum(space, g.z, g.d_block.size(), solver).value /
                         sigma_m(space, g.z, g.d_block.size(), solver).value;
      const double r_y = chebyshev_greedy_sum(space, g.y, b_set.size(), solver).value /
                         sigma_m(space, g.y, b_set.size(), solver).value;
      ratios.push_back({{"delta", delta}, {"r_z", r_z}, {"r_y", r_y}});
    } catch (const ChebyshevFailure&) {
      ratios.push_back({{"delta", delta}, {"r_z", nullptr}, {"r_y", nullptr}});
    }
  }
  auto r = run.finish();
  r.details = {{"ratios", ratios}};
  return r;
}

CheckReport gadget_superdemocracy_sampled(const SpaceSpec& space, const VerifyOptions& options) {
  if (!space.certified("K_b")) return gated("gadget-superdemocracy", space, "K_b");
  require_budget(options);
  if (space.dim() < 2) throw DimensionError("gadgets need dim >= 2");
  Runner run("gadget-superdemocracy", space, options);
  for (std::size_t i = 0; i < options.budget; ++i) {
    Rng rng(mix_seed(options.seed, i));
    const std::size_t a = uniform_index(rng, 1, space.dim() / 2);
    const std::size_t prefix = space.dim() - a;
    const std::size_t b = uniform_index(rng, a, prefix);
    const auto a_set = random_subset(rng, prefix, a);
    const auto b_set = random_subset(rng, prefix, b);
    std::vector<int> eps = random_signs(rng, a);
    std::vector<int> eta = random_signs(rng, b);
    if (i % 4 == 0) {
      std::fill(eps.begin(), eps.end(), 1);
      for (std::size_t k = 0; k < b; ++k) eta[k] = k % 2 == 0 ? 1 : -1;
    }
    for (double delta : options.delta_grid) {
      run.run({{"A", set_to_json(a_set)},
               {"eps", eps},
               {"B", set_to_json(b_set)},
               {"eta", eta},
               {"delta", delta}});
    }
  }
  auto r = run.finish();
  r.details = {{"base_configurations", options.budget}};
  return r;
}

CheckReport gadget_quasigreedy_suite(const SpaceSpec& space, const VerifyOptions& options) {
  if (!space.certified("K_b")) return gated("gadget-quasigreedy", space, "K_b");
  require_budget(options);
  if (space.dim() < 2) throw DimensionError("gadgets need dim >= 2");
  Runner run("gadget-quasigreedy", space, options);
  for (std::size_t i = 0; i < options.budget; ++i) {
    Rng rng(mix_seed(options.seed, i));
    const std::size_t m = uniform_index(rng, 1, space.dim() / 2);
    const std::size_t prefix = space.dim() - m;
    std::vector<double> x(space.dim(), 0.0);
    const std::size_t s = i % 2 == 0 ? prefix : uniform_index(rng, m, prefix);
    const auto support = random_subset(rng, prefix, s);
    const auto values = full_support_vector(rng, s, i % 6 == 1);
    for (std::size_t k = 0; k < s; ++k) x[support[k]] = values[k];
    for (double delta : options.delta_grid) {
      run.run({{"x", x}, {"m", m}, {"delta", delta}});
    }
  }
  auto r = run.finish();
  r.details = {{"base_configurations", options.budget}};
  return r;
}

CheckReport theorem_direct_bound(const SpaceSpec& space, const VerifyOptions& options) {
  if (!space.certified("C_q")) return gated("theorem-a", space, "C_q");
  require_budget(options);
  Runner run("theorem-a", space, options);
  const auto c_sd = run.context().c_sd();
  if (!c_sd) return gated("theorem-a", space, "C_sd");
  for (std::size_t i = 0; i < options.budget; ++i) {
    const auto x = random_candidate(space.dim(), options.seed, i).x;
    for (std::size_t m = 0; m < space.dim(); ++m) run.run({{"x", x.vector()}, {"m", m}});
  }
  auto r = run.finish();
  r.details = {{"c_q", space.certified("C_q")->value}, {"c_sd", *c_sd}};
  return r;
}

CheckReport converse_bound_check(const SpaceSpec& space, std::size_t prefix, std::size_t max_size,
                                 const VerifyOptions& options) {
  if (!space.certified("K_b")) return gated("converse-bound", space, "K_b");
  const std::size_t dim = space.dim();
  if (prefix == 0) prefix = dim;
  if (prefix > dim || max_size == 0 || max_size > prefix) {
    throw std::invalid_argument("converse-bound: need 1 <= max_size <= prefix <= dim");
  }
  Runner run("converse-bound", space, options);
  const auto& solver = run.context().solver();
  const auto table = democracy_table(space, max_size, prefix);
  const auto c_sd = superdemocracy_constant(space, table);
  const double k_b = *run.context().certified("K_b");
  const double threshold = 0.95 * std::sqrt(c_sd.value / 2.0) / k_b;

  struct Best {
    double ratio = -1.0;
    std::vector<double> x;
    std::size_t m = 0;
    std::string source;
  } best;
  std::size_t evaluated = 0;
  std::size_t solver_failures = 0;
  auto consider = [&](const CoefficientVector& x, std::size_t m, const std::string& source) {
    ++evaluated;
    try {
      const double r = semi_ratio(space, x, m, solver);
      if (r > best.ratio) best = {r, x.vector(), m, source};
    } catch (const ChebyshevFailure&) {
      ++solver_failures;
    }
  };

  // gadgets on the C_sd witness, when a fresh block fits after it
  const auto& w = c_sd.witness;
  const auto a_set = set_from_json(w.at("A"));
  const auto b_set = set_from_json(w.at("B"));
  const std::size_t block = a_set.size();
  if (block <= dim && std::max(a_set.back(), b_set.back()) < dim - block) {
    for (double delta : options.delta_grid) {
      const auto g = make_superdemocracy_gadget(dim, a_set, signs_from(w.at("eps")), b_set,
                                                signs_from(w.at("eta")), delta);
      consider(g.z, block, "witness-gadget-z");
      consider(g.y, b_set.size(), "witness-gadget-y");
    }
  }
  for (const auto& cand : gadget_family(space, options.delta_grid)) {
    consider(cand.x, *cand.designed_m, cand.family);
  }
  // the full estimator scans every m, affordable only at small dim
  if (dim < 63 && (1ULL << dim) <= kMaxSignPatterns) {
    EstimatorOptions eo;
    eo.budget = std::max<std::size_t>(1, options.estimator_budget);
    eo.seed = options.seed;
    eo.delta_grid = options.delta_grid;
    eo.solver = solver;
    const auto est = semi_greedy_estimate(space, eo);
    if (est.value > best.ratio && est.witness.contains("x")) {
      best = {est.value, est.witness.at("x").get<std::vector<double>>(),
              est.witness.at("m").get<std::size_t>(),
              "estimator:" + est.witness.at("family").get<std::string>()};
    }
    evaluated += est.witness.value("evaluated", std::size_t{0});
  }
  if (best.ratio >= 0.0) {
    run.run({{"x", best.x}, {"m", best.m}, {"threshold", threshold}, {"source", best.source}});
  }
  auto r = run.finish();
  r.solver_failures += solver_failures;
  r.details = {{"prefix", prefix},         {"max_size", max_size},
               {"c_sd", c_sd.value},       {"c_sd_witness", c_sd.witness},
               {"k_b", k_b},               {"implied_c_s", std::sqrt(c_sd.value / 2.0) / k_b},
               {"threshold", threshold},   {"best_ratio", best.ratio},
               {"best_source", best.source}, {"candidates", evaluated}};
  return r;
}

std::string growth_verdict(const std::vector<double>& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  return trajectory.back() >= kGrowthFactor * trajectory.front() ? "growing" : "bounded";
}

namespace {

std::string family_of(const SpaceSpec& space) {
  auto text = space.canonical();
  const auto pos = text.rfind(":dim=");
  return pos == std::string::npos ? text : text.substr(0, pos);
}

}  // namespace

ClassificationRow classify_family(const SpaceSpec& space, const std::vector<std::size_t>& dims,
                                  const VerifyOptions& options) {
  if (dims.empty()) throw std::invalid_argument("classification needs at least one dimension");
  ClassificationRow row{family_of(space), dims, {}, {}, {}, {}};
  for (std::size_t n : dims) {
    const auto s = space.with_dim(n);
    EstimatorOptions eo;
    eo.budget = std::max<std::size_t>(1, options.estimator_budget);
    eo.seed = options.seed;
    eo.delta_grid = options.delta_grid;
    eo.solver = solver_options_for(s, options);
    row.almost.push_back(almost_greedy_estimate(s, eo).value);
    row.semi.push_back(semi_greedy_estimate(s, eo).value);
  }
  row.almost_verdict = growth_verdict(row.almost);
  row.semi_verdict = growth_verdict(row.semi);
  return row;
}

TheoremBoundsResult theorem_bounds_suite(const std::vector<SpaceSpec>& spaces,
                                         const VerifyOptions& options,
                                         const std::vector<std::size_t>& dims) {
  TheoremBoundsResult result;
  for (const auto& space : spaces) {
    result.reports.push_back(theorem_direct_bound(space, options));
    const std::size_t dim = space.dim();
    if (dim < 63 && (1ULL << dim) <= kMaxSignPatterns) {
      result.reports.push_back(converse_bound_check(space, 0, dim, options));
    } else {
      auto r = gated("converse-bound", space, "C_sd");
      r.details["reason"] = "dim too large for enumerated C_sd";
      result.reports.push_back(std::move(r));
    }
  }
  CheckReport& cls = result.classification;
  cls.check_id = "classification";
  cls.space = "*";
  cls.kind = CheckKind::estimator_dependent;
  AssertionStats stats{"verdict-agreement", CheckKind::estimator_dependent, 0.0, 0, 0,
                       -std::numeric_limits<double>::infinity(), nullptr};
  json rows = json::array();
  for (const auto& space : spaces) {
    const auto row = classify_family(space, dims, options);
    const json inst = {{"space", space.canonical()},
                       {"dims", dims},
                       {"budget", options.estimator_budget},
                       {"seed", options.seed}};
    const double v = row.almost_verdict == row.semi_verdict ? 0.0 : 1.0;
    ++cls.n_instances;
    ++stats.n_evaluated;
    if (v > 0.0) {
      ++cls.n_failures;
      ++stats.n_failures;
    }
    if (v > stats.max_violation) {
      stats.max_violation = v;
      stats.worst_instance = inst;
    }
    if (v > cls.max_violation) {
      cls.max_violation = v;
      cls.worst_witness = {{"assertion", "verdict-agreement"}, {"instance", inst}};
    }
    rows.push_back({{"family", row.family},
                    {"dims", row.dims},
                    {"almost", row.almost},
                    {"semi", row.semi},
                    {"almost_verdict", row.almost_verdict},
                    {"semi_verdict", row.semi_verdict}});
    result.rows.push_back(row);
  }
  cls.assertions.push_back(stats);
  cls.details = {{"growth_factor", kGrowthFactor}, {"rows", rows}};
  return result;
}

double replay_witness(const SpaceSpec& space, const std::string& check_id, const json& witness,
                      const VerifyOptions& options) {
  const auto id = witness.at("assertion").get<std::string>();
  Context ctx(space, options);
  for (const auto& o : evaluator_for(check_id)(ctx, witness.at("instance"))) {
    if (o.id == id) return o.violation();
  }
  throw std::invalid_argument("assertion '" + id + "' not produced by check '" + check_id + "'");
}

}  // namespace greedylab
