#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqident/prob.hpp"
#include "seqident/strategy.hpp"

namespace seqident {

// The observational conditionals p(l_i | a^{<i}, l^{<i}; o), i = 1..N+1, with
// hidden variables summed out. This is everything G-recursion is allowed to
// see; there is no path from here back to the hidden part of the model.
class ObservationalConditionals {
 public:
  enum class StepKind { block, action };

  // One step of the observed sequence L_1, A_1, L_2, ..., A_N, Y. A history
  // is a row-major configuration of every observed variable before the step.
  struct Step {
    StepKind kind = StepKind::block;
    int stage = 0;
    std::vector<int> vars;
    std::size_t prefix_length = 0;
    std::size_t histories = 1;
    std::size_t width = 1;
    // Block steps only: conditional at [history * width + config]; rows with
    // defined[history] == 0 are zero and must not be used.
    std::vector<double> table;
    std::vector<char> defined;
  };

  int n_stages() const noexcept { return n_stages_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  // Observed variables in total order; the last one is the outcome.
  const std::vector<int>& observed() const noexcept { return observed_; }
  // State counts per diagram variable; zero for hidden variables.
  const std::vector<int>& cards() const noexcept { return cards_; }
  // Diagram labels, indexed by variable.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  int outcome() const { return observed_.back(); }
  // Block step for L_i; stage N+1 is the outcome block.
  const Step& block(int stage) const;
  const Step& action_step(int stage) const;
  // Observed prefix configuration encoded by a history index.
  std::vector<int> decode_history(std::size_t prefix_length, std::size_t history) const;

 private:
  friend ObservationalConditionals observational_conditionals(const DiscreteModel& m, const StagedDiagram& d);

  int n_stages_ = 0;
  std::vector<Step> steps_;
  std::vector<int> observed_;
  std::vector<int> cards_;
  std::vector<std::string> labels_;
};

ObservationalConditionals observational_conditionals(const DiscreteModel& m, const StagedDiagram& d);

struct EvaluationResult {
  double value = 0.0;
  std::string method;
  // f over observed prefixes, one table per step boundary: f_tables[0] is
  // f(∅), f_tables.back() is k(y) over full observed histories. Entries for
  // histories that cannot be reached are NaN where undefined. Empty unless
  // requested.
  std::vector<std::vector<double>> f_tables;
};

// Backward alternation of strategy-kernel averages over actions and
// observational-conditional averages over covariate blocks. Throws
// PositivityViolation or MaskedHistoryReachable when a history reachable
// under the strategy has no observational conditional.
EvaluationResult evaluate_g_recursion(const ObservationalConditionals& oc, const Strategy& s, const LossFunction& k,
                                      bool retain_tables = false);

// E{k(Y); s} computed from the interventional joint.
EvaluationResult evaluate_oracle(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                 const LossFunction& k);

// Σ_l p(l; s) E{k(Y) | l; s}; deterministic strategies only (NotDeterministic).
EvaluationResult evaluate_decomposition(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                        const LossFunction& k);

}  // namespace seqident
