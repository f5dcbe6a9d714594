#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqident {

enum class Errc {
  cycle_detected,
  unknown_label,
  unknown_node,
  duplicate_label,
  duplicate_edge,
  overlapping_sets,
  empty_query,
  too_many_nodes,
  invalid_diagram,
  invalid_spec,
  regime_already_present,
  no_regime_node,
  stage_out_of_range,
  shape_mismatch,
  row_not_normalized,
  state_space_too_large,
  zero_probability_evidence,
  state_out_of_range,
  missing_configuration,
  enumeration_too_large,
  positivity_violation,
  masked_history_reachable,
  not_deterministic,
  missing_outcome,
  internal_theorem2_violation,
};

std::string_view to_string(Errc code) noexcept;

// Every library failure is reported through this type; code() identifies the
// failure class and what() carries a human-readable description.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace seqident
