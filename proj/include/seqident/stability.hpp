#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqident/diagram.hpp"
#include "seqident/prob.hpp"
#include "seqident/strategy.hpp"

namespace seqident {

struct CheckEntry {
  int index = 0;
  std::string query;
  bool passed = true;
  // Labels along the separating-failure path; nonempty iff a separation
  // query failed.
  std::vector<std::string> witness;
  // Numeric checks: largest deviation found.
  std::optional<double> deviation;
  // Reported but excluded from the overall verdict.
  bool informational = false;
};

struct IdentificationReport {
  std::string check;
  std::vector<CheckEntry> entries;
  bool overall = true;
  std::vector<std::string> notes;

  const CheckEntry* entry(int index) const;
};

// L_i ⫫ σ | (A^{<i}, L^{<i}) in D for i = 1..N+1 (L_{N+1} = Y), each block
// tested as a set. Empty blocks pass trivially.
IdentificationReport check_simple_stability(const StagedDiagram& d);

// (L_i, U_i) ⫫ σ | (A^{<i}, L^{<i}, U^{<i}) in D.
IdentificationReport check_extended_stability(const StagedDiagram& d);

// Y ⫫ σ | (A^{≤i}, L^{≤i}) in D_i for i = 1..N.
IdentificationReport check_general(const StagedDiagram& d, const StrategyParentSpec& spec);

// Y ⫫ A_i | (A^{<i}, L^{≤i}) in D'_i, with D' carrying the strategy's parents
// into later actions.
IdentificationReport check_pearl_robins(const StagedDiagram& d, const StrategyParentSpec& spec);

// (a) pa_s ⊆ pa_o per action, (b) each covariate an ancestor of Y in D_0,
// (c) informational: each action an ancestor of Y in D_0 and each covariate
// an ancestor of some action in D_0.
IdentificationReport check_assumptions(const StagedDiagram& d, const StrategyParentSpec& spec);

// Compares p_{i-1}(y | a^{≤i}, l^{≤i}) with p_i(y | a^{≤i}, l^{≤i}) for
// i = 1..N on histories with positive probability under both.
IdentificationReport check_theorem1_numeric(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                            double tol = kEqualityTolerance);

enum class Verdict { identified_simple, identified_general, not_guaranteed };

std::string_view to_string(Verdict v) noexcept;

struct Identification {
  Verdict verdict = Verdict::not_guaranteed;
  std::vector<IdentificationReport> reports;
};

// Simple stability first, then the general check. NotGuaranteed is not a
// proof of non-identifiability. Throws InternalTheorem2Violation if a
// full-history spec satisfying both assumptions passes the general check
// while simple stability fails.
Identification decide_identifiability(const StagedDiagram& d, const StrategyParentSpec& spec);

}  // namespace seqident
