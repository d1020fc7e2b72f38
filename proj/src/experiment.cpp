#include "greedylab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "greedylab/errors.hpp"
#include "greedylab/format.hpp"
#include "greedylab/sampling.hpp"
#include "greedylab/verify.hpp"

namespace greedylab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  }
  return v;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string set_cell(const IndexSet& set) { return csv_quote(set_to_json(set).dump()); }
std::string signs_cell(const SignPattern& s) { return csv_quote(json(s.signs()).dump()); }

}  // namespace

SpaceSpec ExperimentConfig::resolved_space() const {
  if (space.empty()) throw ConfigError("missing --space");
  return SpaceSpec::parse(space, dim);
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid value for " + key + ": '" + text + "' (need a nonnegative integer)");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid value for seed: '" + text + "' (need a 64-bit unsigned integer)");
  }
  return v;
}

std::vector<std::string> parse_suites(const std::string& text) {
  const auto items = split_list(text);
  if (items.empty()) throw ConfigError("empty suite list");
  std::vector<std::string> out;
  for (const auto& s : items) {
    if (s == "all") return kSuiteNames;
    if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) == kSuiteNames.end()) {
      throw ConfigError("unknown suite '" + s + "'");
    }
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<double> parse_delta_grid(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const double d = parse_real("delta-grid", item);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw ConfigError("invalid value for delta-grid: '" + item + "' (need delta > 0)");
    }
    out.push_back(d);
  }
  if (out.empty()) throw ConfigError("empty delta-grid");
  return out;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "space") {
    config.space = value;
  } else if (key == "dim") {
    config.dim = parse_count(key, value);
    if (*config.dim == 0) throw ConfigError("invalid value for dim: '0' (need dim >= 1)");
  } else if (key == "max-m") {
    config.max_m = parse_count(key, value);
  } else if (key == "samples") {
    config.samples = parse_count(key, value);
    if (config.samples == 0) throw ConfigError("invalid value for samples: '0' (need >= 1)");
  } else if (key == "seed") {
    config.seed = parse_seed(value);
  } else if (key == "delta-grid") {
    config.delta_grid = parse_delta_grid(value);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "suite") {
    config.suites = parse_suites(value);
  } else if (key == "vector") {
    config.vector_file = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<double> read_vector_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read vector file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto text = ss.str();
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream tokens(text);
  std::vector<double> out;
  std::string tok;
  while (tokens >> tok) {
    const double v = parse_real("vector entry", tok);
    if (!std::isfinite(v)) throw ConfigError("vector entry is not finite: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("vector file '" + path.string() + "' is empty");
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string spaces_listing(std::size_t dim) {
  std::string out;
  for (const auto& s : builtin_spaces(dim)) {
    const auto c_q = s.certified("C_q");
    out += s.canonical() + "\tK_b=" + format_shortest(s.certified("K_b")->value) +
           "\tC_q=" + (c_q ? format_shortest(c_q->value) : std::string("-")) + "\n";
  }
  return out;
}

std::string constants_csv(const ExperimentConfig& config) {
  const auto space = config.resolved_space();
  const std::size_t max_m = std::min(config.max_m.value_or(space.dim()), space.dim());
  EstimatorOptions eo;
  eo.budget = config.samples;
  eo.seed = config.seed;
  eo.delta_grid = config.delta_grid;
  eo.solver = default_chebyshev_options(space, config.seed);
  eo.max_m = max_m;

  std::vector<ConstantEstimate> rows;
  auto k_b = basis_constant(space, ConstantMode::certified);
  rows.push_back(k_b.available() ? k_b
                                 : basis_constant(space, ConstantMode::sampled, config.samples,
                                                  config.seed));
  std::clog << "[constants] quasi-greedy estimate\n";
  rows.push_back(quasi_greedy_estimate(space, eo));
  std::clog << "[constants] almost-greedy estimate\n";
  rows.push_back(almost_greedy_estimate(space, eo));
  std::clog << "[constants] semi-greedy estimate\n";
  rows.push_back(semi_greedy_estimate(space, eo));
  if (max_m >= 1) {
    const auto table = democracy_table(space, max_m);
    rows.push_back(superdemocracy_constant(space, table));
    rows.push_back(democracy_constant(space, table));
  }

  std::string out = "name,value,kind,witness\n";
  for (const auto& r : rows) {
    out += r.name + "," + format_double(r.value) + "," + std::string(to_string(r.kind)) + "," +
           csv_quote(r.witness.dump()) + "\n";
  }
  return out;
}

std::string democracy_csv(const ExperimentConfig& config) {
  const auto space = config.resolved_space();
  const std::size_t max_m = std::min(config.max_m.value_or(space.dim()), space.dim());
  const auto table = democracy_table(space, max_m);
  std::string out =
      "m,phi,psi,phi_plain,psi_plain,argmax_set,argmax_signs,argmin_set,argmin_signs\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.m) + "," + format_double(r.phi) + "," + format_double(r.psi) + "," +
           format_double(r.phi_plain) + "," + format_double(r.psi_plain) + "," +
           set_cell(r.argmax_set) + "," + signs_cell(r.argmax_signs) + "," +
           set_cell(r.argmin_set) + "," + signs_cell(r.argmin_signs) + "\n";
  }
  return out;
}

std::string curve_csv(const ExperimentConfig& config) {
  const auto space = config.resolved_space();
  std::vector<double> values;
  if (config.vector_file) {
    values = read_vector_file(*config.vector_file);
    if (values.size() != space.dim()) {
      throw ConfigError("vector has " + std::to_string(values.size()) + " entries, space dim is " +
                        std::to_string(space.dim()));
    }
  } else {
    Rng rng(mix_seed(config.seed, 0));
    values = gaussian_vector(rng, space.dim());
  }
  const std::size_t max_m = std::min(config.max_m.value_or(space.dim()), space.dim());
  const auto curve = error_curve(space, CoefficientVector(std::move(values)), max_m,
                                 default_chebyshev_options(space, config.seed));
  std::string out = "m,greedy_err,cheb_err,sigma,sigma_tilde\n";
  for (const auto& r : curve.rows) {
    out += std::to_string(r.m) + "," + format_double(r.greedy_err) + "," +
           format_double(r.cheb_err) + "," + format_double(r.sigma) + "," +
           format_double(r.sigma_tilde) + "\n";
  }
  return out;
}

namespace {

/// Estimator samples inside theorem-bounds; the scans cover every m, so the
/// suite budget would be far too slow at dim 12.
constexpr std::size_t kEstimatorBudgetCap = 40;

}  // namespace

VerifyOutcome verify_report(const ExperimentConfig& config) {
  const auto space = config.resolved_space();
  SolverAudit audit;
  VerifyOptions o;
  o.budget = config.samples;
  o.seed = config.seed;
  o.delta_grid = config.delta_grid;
  o.estimator_budget = std::min(config.samples, kEstimatorBudgetCap);
  o.solver.audit = &audit;

  std::vector<CheckReport> reports;
  for (const auto& suite : config.suites) {
    std::clog << "[verify] " << suite << " on " << space.canonical() << "\n";
    if (suite == "convexity") {
      reports.push_back(check_convexity_corollary(space, o));
    } else if (suite == "truncation") {
      reports.push_back(check_truncation_bound(space, o));
    } else if (suite == "min-coeff") {
      reports.push_back(check_min_coeff_bound(space, o));
    } else if (suite == "witness-w") {
      reports.push_back(witness_w_suite(space, o));
    } else if (suite == "gadget-superdemocracy") {
      reports.push_back(gadget_superdemocracy_sampled(space, o));
    } else if (suite == "gadget-quasigreedy") {
      reports.push_back(gadget_quasigreedy_suite(space, o));
    } else if (suite == "theorem-bounds") {
      auto tb = theorem_bounds_suite({space}, o);
      for (auto& r : tb.reports) reports.push_back(std::move(r));
      reports.push_back(std::move(tb.classification));
    }
  }

  VerifyOutcome outcome;
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    const bool exact_failure = r.kind == CheckKind::exact && r.n_failures > 0;
    if (exact_failure || r.solver_failures > 0) outcome.exit_code = kExitFailure;
    std::clog << "[verify] " << r.check_id << ": " << to_string(r.status) << ", "
              << r.n_instances << " instances, " << r.n_failures << " failures\n";
  }
  std::clog << "[verify] solver: " << audit.solves << " solves, " << audit.failures
            << " uncertified\n";
  if (audit.failures > 0) outcome.exit_code = kExitFailure;
  outcome.report_json = arr.dump(2) + "\n";
  return outcome;
}

int run_constants(const ExperimentConfig& config) {
  const auto constants = constants_csv(config);
  const auto democracy = democracy_csv(config);
  write_atomic(config.out / "constants.csv", constants);
  write_atomic(config.out / "democracy.csv", democracy);
  return kExitOk;
}

int run_curve(const ExperimentConfig& config) {
  write_atomic(config.out / "curve.csv", curve_csv(config));
  return kExitOk;
}

int run_verify(const ExperimentConfig& config) {
  const auto outcome = verify_report(config);
  write_atomic(config.out / "report.json", outcome.report_json);
  return outcome.exit_code;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EnumerationCapError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace greedylab
