#include "seqident/error.hpp"

namespace seqident {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::duplicate_label: return "DuplicateLabel";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::overlapping_sets: return "OverlappingSets";
    case Errc::empty_query: return "EmptyQuery";
    case Errc::too_many_nodes: return "TooManyNodes";
    case Errc::invalid_diagram: return "InvalidDiagram";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::regime_already_present: return "RegimeAlreadyPresent";
    case Errc::no_regime_node: return "NoRegimeNode";
    case Errc::stage_out_of_range: return "StageOutOfRange";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::row_not_normalized: return "RowNotNormalized";
    case Errc::state_space_too_large: return "StateSpaceTooLarge";
    case Errc::zero_probability_evidence: return "ZeroProbabilityEvidence";
    case Errc::state_out_of_range: return "StateOutOfRange";
    case Errc::missing_configuration: return "MissingConfiguration";
    case Errc::enumeration_too_large: return "EnumerationTooLarge";
    case Errc::positivity_violation: return "PositivityViolation";
    case Errc::masked_history_reachable: return "MaskedHistoryReachable";
    case Errc::not_deterministic: return "NotDeterministic";
    case Errc::missing_outcome: return "MissingOutcome";
    case Errc::internal_theorem2_violation: return "InternalTheorem2Violation";
  }
  return "Unknown";
}

}  // namespace seqident
