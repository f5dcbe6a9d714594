#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqident/graph.hpp"

namespace seqident {

// Label of the regime indicator node added by augment_with_regime.
inline constexpr std::string_view kRegimeLabel = "sigma";

enum class VarKind { action, covariate, hidden, outcome };

std::string_view to_string(VarKind kind) noexcept;
std::optional<VarKind> parse_var_kind(std::string_view text) noexcept;

struct Variable {
  std::string label;
  VarKind kind = VarKind::covariate;
  int stage = 1;

  bool operator==(const Variable&) const = default;
};

struct Edge {
  int from = 0;
  int to = 0;
  // Added by normalize_parents; carries no influence on the observational
  // action kernel.
  bool inert = false;

  auto operator<=>(const Edge&) const = default;
};

// A staged influence diagram without the regime node. The position of a
// variable in `vars` is its place in the total order, so `vars` must be
// stage-major with each stage's action last and the outcome at the very end.
struct StagedDiagram {
  int n_stages = 0;
  std::vector<Variable> vars;
  std::vector<Edge> edges;

  int size() const noexcept { return static_cast<int>(vars.size()); }
  std::optional<int> find(std::string_view label) const;
  int index_of(std::string_view label) const;
  const std::string& label(int v) const { return vars.at(static_cast<std::size_t>(v)).label; }
  VarKind kind(int v) const { return vars.at(static_cast<std::size_t>(v)).kind; }
  bool is_observed(int v) const { return kind(v) != VarKind::hidden; }

  // Index of A_i, 1 <= i <= n_stages.
  int action(int stage) const;
  int outcome() const;
  // L_i: covariates of a stage; stage n_stages + 1 yields {Y}.
  std::vector<int> covariate_block(int stage) const;
  // U_i.
  std::vector<int> hidden_block(int stage) const;
  // Observational parents (inert ones included), ascending.
  std::vector<int> parents(int v) const;
  // Observable variables (actions and covariates) positioned before v.
  std::vector<int> observed_before(int v) const;

  // D': the diagram's DAG with node indices equal to variable positions.
  Dag to_dag() const;

  bool operator==(const StagedDiagram&) const = default;
};

enum class ViolationKind {
  bad_stage_order,
  multiple_outcomes,
  missing_outcome,
  hidden_after_outcome,
  edge_against_order,
  action_count,
  duplicate_label,
  reserved_label,
  duplicate_edge,
  too_many_nodes,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct DiagramViolation {
  ViolationKind kind;
  std::string message;
};

// Full list of structural violations; empty means valid.
std::vector<DiagramViolation> validate_diagram(const StagedDiagram& d);
// Throws InvalidDiagram listing every violation.
void require_valid(const StagedDiagram& d);

// pa_s(A_i) for each action, indexed by stage - 1, each list ascending.
struct StrategyParentSpec {
  std::vector<std::vector<int>> parents;

  const std::vector<int>& of(int stage) const { return parents.at(static_cast<std::size_t>(stage - 1)); }

  // Every observable predecessor of each action.
  static StrategyParentSpec full_history(const StagedDiagram& d);
  static StrategyParentSpec unconditional(const StagedDiagram& d);

  bool operator==(const StrategyParentSpec&) const = default;
};

std::vector<std::string> spec_violations(const StagedDiagram& d, const StrategyParentSpec& spec);
// Throws InvalidSpec.
void require_valid(const StagedDiagram& d, const StrategyParentSpec& spec);
bool is_full_history(const StagedDiagram& d, const StrategyParentSpec& spec);

// D: the diagram plus a parentless regime node (last index) pointing into
// every action.
Dag augment_with_regime(const StagedDiagram& d);
// Throws RegimeAlreadyPresent when `dprime` already has a regime node.
Dag augment_with_regime(const Dag& dprime, const StagedDiagram& d);
// Removes the regime node and its edges. Throws NoRegimeNode.
Dag strip_regime(const Dag& g);

// Adds pa_s(A_i) \ pa_o(A_i) to each action's parents as inert edges.
StagedDiagram normalize_parents(const StagedDiagram& d, const StrategyParentSpec& spec);

// D_i for 1 <= i <= N: the regime node points only into A_i; A_j keeps its
// observational parents for j < i, takes pa_s(A_j) for j > i, and A_i gets
// the union plus the regime node. i = 0 gives D_0: every action has pa_s
// parents and there is no regime node.
Dag build_check_graph(const StagedDiagram& d, const StrategyParentSpec& spec, int stage);

// D'_i: edges out of A_i removed, and for j > i every edge into A_j whose tail
// is not in pa_s(A_j).
Dag build_pearl_robins_graph(const Dag& dprime, const StagedDiagram& d, const StrategyParentSpec& spec,
                             int stage);

}  // namespace seqident
