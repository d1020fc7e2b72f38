#include "greedylab/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "greedylab/format.hpp"
#include "greedylab/sampling.hpp"

namespace greedylab {

std::string_view to_string(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::certified_exact: return "certified-exact";
    case EstimateKind::enumerated_exact: return "enumerated-exact";
    case EstimateKind::sampled_lower_bound: return "sampled-lower-bound";
    case EstimateKind::unavailable: return "no certified constant";
  }
  return "unknown";
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::lp: return "lp";
    case NormKind::weighted_lp: return "wlp";
    case NormKind::summing: return "summing";
    case NormKind::lorentz: return "lorentz";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// CoefficientVector / SignPattern

CoefficientVector::CoefficientVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DimensionError("coefficient vector must have dim >= 1");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!std::isfinite(coeffs_[i])) {
      throw std::invalid_argument("coefficient " + std::to_string(i + 1) + " is not finite");
    }
  }
}

CoefficientVector CoefficientVector::zeros(std::size_t dim) {
  return CoefficientVector(std::vector<double>(dim, 0.0));
}

IndexSet CoefficientVector::support() const {
  IndexSet out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) out.push_back(i);
  }
  return out;
}

SignPattern::SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign pattern entries must be +1 or -1");
  }
}

// ---------------------------------------------------------------------------
// Exponent / weights

Exponent Exponent::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw SpecError("invalid value for parameter p: " + format_double(p) + " (need p >= 1 or inf)");
  }
  return Exponent(p, false);
}

double Exponent::value() const {
  if (infinite_) throw std::logic_error("Exponent::value() on p = inf");
  return p_;
}

std::string Exponent::to_string() const { return infinite_ ? "inf" : format_shortest(p_); }

std::vector<double> WeightFamily::materialize(std::size_t dim) const {
  std::vector<double> w(dim);
  if (name == "harmonic") {
    for (std::size_t n = 0; n < dim; ++n) w[n] = 1.0 / static_cast<double>(n + 1);
  } else if (name == "ones") {
    std::fill(w.begin(), w.end(), 1.0);
  } else if (name == "list") {
    if (values.size() < dim) {
      throw SpecError("weight list 'w' has " + std::to_string(values.size()) +
                      " entries, dim=" + std::to_string(dim) + " needs at least that many");
    }
    std::copy_n(values.begin(), dim, w.begin());
  } else {
    throw SpecError("unknown weight family 'w=" + name + "'");
  }
  for (std::size_t n = 0; n < dim; ++n) {
    if (!(w[n] > 0.0) || !std::isfinite(w[n])) {
      throw SpecError("weights 'w' must be strictly positive (entry " + std::to_string(n + 1) + ")");
    }
    if (n > 0 && w[n] > w[n - 1]) {
      throw SpecError("weights 'w' must be nonincreasing (entry " + std::to_string(n + 1) + ")");
    }
  }
  return w;
}

std::string WeightFamily::to_string() const {
  if (name != "list") return name;
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_shortest(values[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SpaceSpec

SpaceSpec::SpaceSpec(NormKind kind, Exponent p, WeightFamily weights, std::size_t dim)
    : kind_(kind), p_(p), weight_family_(std::move(weights)), dim_(dim) {
  if (dim_ == 0) throw SpecError("invalid value for parameter dim: 0 (need dim >= 1)");
  if (kind_ == NormKind::weighted_lp || kind_ == NormKind::lorentz) {
    weights_ = weight_family_.materialize(dim_);
  }
}

SpaceSpec SpaceSpec::lp(Exponent p, std::size_t dim) {
  return SpaceSpec(NormKind::lp, p, {}, dim);
}

SpaceSpec SpaceSpec::weighted_lp(Exponent p, WeightFamily weights, std::size_t dim) {
  return SpaceSpec(NormKind::weighted_lp, p, std::move(weights), dim);
}

SpaceSpec SpaceSpec::summing(std::size_t dim) {
  return SpaceSpec(NormKind::summing, Exponent::finite(1.0), {}, dim);
}

SpaceSpec SpaceSpec::lorentz(WeightFamily weights, std::size_t dim) {
  return SpaceSpec(NormKind::lorentz, Exponent::finite(1.0), std::move(weights), dim);
}

SpaceSpec SpaceSpec::with_dim(std::size_t dim) const {
  return SpaceSpec(kind_, p_, weight_family_, dim);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_number(std::string_view token, std::string_view param) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.empty()) {
    throw SpecError("invalid value for parameter " + std::string(param) + ": '" +
                    std::string(token) + "'");
  }
  return value;
}

Exponent parse_exponent(std::string_view token) {
  if (token == "inf" || token == "infinity") return Exponent::infinity();
  const double p = parse_number(token, "p");
  if (!(p >= 1.0)) {
    throw SpecError("invalid value for parameter p: '" + std::string(token) +
                    "' (need p >= 1 or inf)");
  }
  return Exponent::finite(p);
}

WeightFamily parse_weights(std::string_view token) {
  if (token == "harmonic") return WeightFamily::harmonic();
  if (token == "ones") return WeightFamily::ones();
  std::vector<double> values;
  for (auto part : split(token, ',')) values.push_back(parse_number(part, "w"));
  return WeightFamily::list(std::move(values));
}

std::size_t parse_dim(std::string_view token) {
  std::size_t dim = 0;
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, dim);
  if (ec != std::errc() || ptr != last || token.empty() || dim == 0) {
    throw SpecError("invalid value for parameter dim: '" + std::string(token) + "'");
  }
  return dim;
}

}  // namespace

SpaceSpec SpaceSpec::parse(std::string_view text, std::optional<std::size_t> dim_override) {
  const auto tokens = split(text, ':');
  const std::string_view id = tokens.front();
  if (id != "lp" && id != "wlp" && id != "summing" && id != "lorentz") {
    throw SpecError("unknown norm id '" + std::string(id) +
                    "' (expected lp, wlp, summing or lorentz)");
  }
  std::optional<Exponent> p;
  std::optional<WeightFamily> w;
  std::size_t dim = 8;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto token = tokens[i];
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw SpecError("malformed token '" + std::string(token) + "' (expected key=value)");
    }
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    const bool takes_p = id == "lp" || id == "wlp";
    const bool takes_w = id == "wlp" || id == "lorentz";
    if (key == "p" && takes_p) {
      p = parse_exponent(value);
    } else if (key == "w" && takes_w) {
      w = parse_weights(value);
    } else if (key == "dim") {
      dim = parse_dim(value);
    } else {
      throw SpecError("unknown parameter '" + std::string(key) + "' for norm '" +
                      std::string(id) + "'");
    }
  }
  if (dim_override) dim = *dim_override;
  if ((id == "lp" || id == "wlp") && !p) {
    throw SpecError("missing parameter p for norm '" + std::string(id) + "'");
  }
  if ((id == "wlp" || id == "lorentz") && !w) {
    throw SpecError("missing parameter w for norm '" + std::string(id) + "'");
  }
  if (id == "lp") return lp(*p, dim);
  if (id == "wlp") return weighted_lp(*p, *w, dim);
  if (id == "summing") return summing(dim);
  return lorentz(*w, dim);
}

std::string SpaceSpec::canonical() const {
  std::string out(to_string(kind_));
  if (kind_ == NormKind::lp || kind_ == NormKind::weighted_lp) out += ":p=" + p_.to_string();
  if (kind_ == NormKind::weighted_lp || kind_ == NormKind::lorentz) {
    out += ":w=" + weight_family_.to_string();
  }
  out += ":dim=" + std::to_string(dim_);
  return out;
}

namespace {

double lp_norm(std::span<const double> x, const Exponent& p) {
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  const double e = p.value();
  if (e == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  if (e == 2.0) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  }
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / scale, e);
  return scale * std::pow(s, 1.0 / e);
}

double weighted_lp_norm(std::span<const double> x, const std::vector<double>& w,
                        const Exponent& p) {
  if (p.is_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, w[i] * std::abs(x[i]));
    return m;
  }
  const double e = p.value();
  if (e == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::abs(x[i]);
    return s;
  }
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i]) / scale, e);
  return scale * std::pow(s, 1.0 / e);
}

double summing_norm(std::span<const double> x) {
  double prefix = 0.0;
  double m = 0.0;
  for (double v : x) {
    prefix += v;
    m = std::max(m, std::abs(prefix));
  }
  return m;
}

double lorentz_norm(std::span<const double> x, const std::vector<double>& w) {
  thread_local std::vector<double> magnitudes;
  magnitudes.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) magnitudes[i] = std::abs(x[i]);
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t n = 0; n < magnitudes.size(); ++n) s += w[n] * magnitudes[n];
  return s;
}

}  // namespace

double SpaceSpec::norm(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionError("dimension mismatch: vector has dim " + std::to_string(x.size()) +
                         ", space " + canonical() + " has dim " + std::to_string(dim_));
  }
  switch (kind_) {
    case NormKind::lp: return lp_norm(x, p_);
    case NormKind::weighted_lp: return weighted_lp_norm(x, weights_, p_);
    case NormKind::summing: return summing_norm(x);
    case NormKind::lorentz: return lorentz_norm(x, weights_);
  }
  return 0.0;
}

std::pair<double, double> SpaceSpec::unit_vector_bounds() const {
  switch (kind_) {
    case NormKind::lp:
    case NormKind::summing: return {1.0, 1.0};
    case NormKind::lorentz: return {weights_.front(), weights_.front()};
    case NormKind::weighted_lp: {
      if (p_.is_infinite()) return {weights_.back(), weights_.front()};
      const double e = p_.value();
      return {std::pow(weights_.back(), 1.0 / e), std::pow(weights_.front(), 1.0 / e)};
    }
  }
  return {0.0, 0.0};
}

std::optional<CertifiedConstant> SpaceSpec::certified(std::string_view name) const {
  if (name == "K_b") {
    return CertifiedConstant{1.0, "zeroing a suffix of coordinates never increases this norm"};
  }
  if (name == "C_q" && is_lattice()) {
    return CertifiedConstant{
        1.0, "lattice norm: x - G_m(x) and T_a(x) are dominated coordinatewise by x"};
  }
  return std::nullopt;
}

std::vector<SpaceSpec> builtin_spaces(std::size_t dim) {
  return {
      SpaceSpec::lp(Exponent::finite(1.0), dim),
      SpaceSpec::lp(Exponent::finite(2.0), dim),
      SpaceSpec::lp(Exponent::infinity(), dim),
      SpaceSpec::weighted_lp(Exponent::finite(1.0), WeightFamily::harmonic(), dim),
      SpaceSpec::lorentz(WeightFamily::harmonic(), dim),
      SpaceSpec::summing(dim),
  };
}

// ---------------------------------------------------------------------------
// Operations on coefficient vectors

double eval_norm(const SpaceSpec& space, const CoefficientVector& x) { return space.norm(x.values()); }

CoefficientVector partial_sum(const CoefficientVector& x, std::size_t n) {
  if (n > x.dim()) {
    throw std::out_of_range("partial sum length " + std::to_string(n) + " exceeds dim " +
                            std::to_string(x.dim()));
  }
  std::vector<double> out(x.dim(), 0.0);
  std::copy_n(x.values().begin(), n, out.begin());
  return CoefficientVector(std::move(out));
}

CoefficientVector project(const CoefficientVector& x, const IndexSet& set) {
  std::vector<double> out(x.dim(), 0.0);
  for (std::size_t i : set) {
    if (i >= x.dim()) {
      throw std::out_of_range("index " + std::to_string(i + 1) + " outside 1.." +
                              std::to_string(x.dim()));
    }
    out[i] = x[i];
  }
  return CoefficientVector(std::move(out));
}

CoefficientVector indicator(const IndexSet& set, const SignPattern& signs, std::size_t dim) {
  if (set.size() != signs.size()) {
    throw std::invalid_argument("sign pattern has " + std::to_string(signs.size()) +
                                " entries for a set of size " + std::to_string(set.size()));
  }
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] >= dim) {
      throw std::out_of_range("index " + std::to_string(set[k] + 1) + " outside 1.." +
                              std::to_string(dim));
    }
    out[set[k]] = signs[k];
  }
  return CoefficientVector(std::move(out));
}

ConstantEstimate basis_ratio(const SpaceSpec& space, const CoefficientVector& x) {
  const double full = eval_norm(space, x);
  ConstantEstimate est{"K_b", 0.0, EstimateKind::sampled_lower_bound, {}};
  if (full == 0.0) return est;
  std::vector<double> prefix(x.dim(), 0.0);
  std::size_t best_n = 0;
  for (std::size_t n = 1; n <= x.dim(); ++n) {
    prefix[n - 1] = x[n - 1];
    const double ratio = space.norm(prefix) / full;
    if (ratio > est.value) {
      est.value = ratio;
      best_n = n;
    }
  }
  est.witness = {{"x", x.vector()}, {"n", best_n}};
  return est;
}

ConstantEstimate basis_constant(const SpaceSpec& space, ConstantMode mode, std::size_t budget,
                                std::uint64_t seed) {
  if (mode == ConstantMode::certified) {
    if (const auto c = space.certified("K_b")) {
      return {"K_b", c->value, EstimateKind::certified_exact, {{"justification", c->justification}}};
    }
    return {"K_b", std::numeric_limits<double>::quiet_NaN(), EstimateKind::unavailable,
            {{"status", "no certified constant"}}};
  }
  if (budget == 0) throw std::invalid_argument("sample budget must be >= 1");
  ConstantEstimate best{"K_b", 0.0, EstimateKind::sampled_lower_bound, {}};
  for (std::size_t s = 0; s < budget; ++s) {
    Rng rng(mix_seed(seed, s));
    const auto est = basis_ratio(space, CoefficientVector(gaussian_vector(rng, space.dim())));
    if (est.value > best.value) best = est;
  }
  return best;
}

}  // namespace greedylab
