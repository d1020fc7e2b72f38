#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace greedylab {

enum class EstimateKind {
  certified_exact,
  enumerated_exact,
  sampled_lower_bound,
  /// Certified lookup on a space without a stored value.
  unavailable,
};

std::string_view to_string(EstimateKind kind);

/// Value of one of K_b, C_q, C_al, C_s, C_sd, C_d together with how it was
/// obtained and the inputs that realize it.
struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  EstimateKind kind = EstimateKind::unavailable;
  nlohmann::json witness = nlohmann::json::object();

  bool available() const { return kind != EstimateKind::unavailable; }
};

}  // namespace greedylab
