#pragma once

#include <cstdint>
#include <vector>

#include "seqident/evaluate.hpp"

namespace seqident {

// Chosen action at one history of the observed sequence.
struct HistoryDecision {
  int stage = 0;
  // Values of every observed variable before A_i, in total order.
  std::vector<int> history;
  int action = 0;
  // f(a^{<i}, a_i, l^{≤i}) for each candidate a_i.
  std::vector<double> action_values;
  // No strategy reaches this history; the lowest action is assigned.
  bool unreachable = false;
};

struct OptimizationResult {
  double value = 0.0;
  Strategy strategy;
  // Brute force only: enumeration indices of every maximiser.
  std::vector<std::uint64_t> argmax;
  std::uint64_t evaluated = 0;
  // Backward induction only.
  std::vector<HistoryDecision> decisions;
};

// Backward induction over full observed histories, maximising k. Ties go to
// the lowest action index. Requires a full-history spec (InvalidSpec) and
// positivity of every candidate action at every reachable history
// (PositivityViolation).
OptimizationResult optimize_backward(const ObservationalConditionals& oc, const StagedDiagram& d,
                                     const LossFunction& k, const StrategyParentSpec& spec);

// Evaluates every deterministic strategy for `spec` by G-recursion.
OptimizationResult optimize_bruteforce(const ObservationalConditionals& oc, const StagedDiagram& d,
                                       const LossFunction& k, const StrategyParentSpec& spec,
                                       std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace seqident
