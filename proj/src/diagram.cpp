#include "seqident/diagram.hpp"

#include <algorithm>
#include <set>

#include "seqident/error.hpp"

namespace seqident {

std::string_view to_string(VarKind kind) noexcept {
  switch (kind) {
    case VarKind::action: return "action";
    case VarKind::covariate: return "covariate";
    case VarKind::hidden: return "hidden";
    case VarKind::outcome: return "outcome";
  }
  return "?";
}

std::optional<VarKind> parse_var_kind(std::string_view text) noexcept {
  for (auto k : {VarKind::action, VarKind::covariate, VarKind::hidden, VarKind::outcome}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::bad_stage_order: return "BadStageOrder";
    case ViolationKind::multiple_outcomes: return "MultipleOutcomes";
    case ViolationKind::missing_outcome: return "MissingOutcome";
    case ViolationKind::hidden_after_outcome: return "HiddenAfterOutcome";
    case ViolationKind::edge_against_order: return "EdgeAgainstOrder";
    case ViolationKind::action_count: return "ActionCount";
    case ViolationKind::duplicate_label: return "DuplicateLabel";
    case ViolationKind::reserved_label: return "ReservedLabel";
    case ViolationKind::duplicate_edge: return "DuplicateEdge";
    case ViolationKind::too_many_nodes: return "TooManyNodes";
  }
  return "?";
}

std::optional<int> StagedDiagram::find(std::string_view label) const {
  for (int v = 0; v < size(); ++v) {
    if (vars[v].label == label) return v;
  }
  return std::nullopt;
}

int StagedDiagram::index_of(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw Error(Errc::unknown_label, "'" + std::string(label) + "'");
}

int StagedDiagram::action(int stage) const {
  for (int v = 0; v < size(); ++v) {
    if (vars[v].kind == VarKind::action && vars[v].stage == stage) return v;
  }
  throw Error(Errc::stage_out_of_range, "no action at stage " + std::to_string(stage));
}

int StagedDiagram::outcome() const {
  for (int v = 0; v < size(); ++v) {
    if (vars[v].kind == VarKind::outcome) return v;
  }
  throw Error(Errc::missing_outcome, "diagram has no outcome variable");
}

std::vector<int> StagedDiagram::covariate_block(int stage) const {
  if (stage == n_stages + 1) return {outcome()};
  std::vector<int> out;
  for (int v = 0; v < size(); ++v) {
    if (vars[v].kind == VarKind::covariate && vars[v].stage == stage) out.push_back(v);
  }
  return out;
}

std::vector<int> StagedDiagram::hidden_block(int stage) const {
  std::vector<int> out;
  for (int v = 0; v < size(); ++v) {
    if (vars[v].kind == VarKind::hidden && vars[v].stage == stage) out.push_back(v);
  }
  return out;
}

std::vector<int> StagedDiagram::parents(int v) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.to == v) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> StagedDiagram::observed_before(int v) const {
  std::vector<int> out;
  for (int w = 0; w < v; ++w) {
    if (vars[w].kind == VarKind::action || vars[w].kind == VarKind::covariate) out.push_back(w);
  }
  return out;
}

Dag StagedDiagram::to_dag() const {
  std::vector<std::string> labels;
  labels.reserve(vars.size());
  for (const auto& var : vars) labels.push_back(var.label);
  std::vector<Arc> arcs;
  arcs.reserve(edges.size());
  for (const auto& e : edges) arcs.emplace_back(e.from, e.to);
  return Dag::from_arcs(std::move(labels), std::move(arcs));
}

std::vector<DiagramViolation> validate_diagram(const StagedDiagram& d) {
  std::vector<DiagramViolation> out;
  auto report = [&](ViolationKind kind, std::string message) { out.push_back({kind, std::move(message)}); };
  const int n = d.size();
  const int last_stage = d.n_stages + 1;

  if (d.n_stages < 1) report(ViolationKind::action_count, "stage count must be at least 1");
  if (n + 1 > kMaxNodes) {
    report(ViolationKind::too_many_nodes, std::to_string(n) + " variables plus the regime node exceed " +
                                              std::to_string(kMaxNodes));
  }

  std::set<std::string> seen;
  for (const auto& var : d.vars) {
    if (!seen.insert(var.label).second) report(ViolationKind::duplicate_label, "'" + var.label + "' declared twice");
    if (var.label == kRegimeLabel) report(ViolationKind::reserved_label, "'" + var.label + "' is reserved");
  }

  int outcomes = 0;
  std::vector<int> actions_per_stage(static_cast<std::size_t>(std::max(d.n_stages, 0) + 2), 0);
  for (int v = 0; v < n; ++v) {
    const auto& var = d.vars[v];
    if (var.kind == VarKind::outcome) {
      ++outcomes;
      if (var.stage != last_stage) {
        report(ViolationKind::bad_stage_order, "outcome '" + var.label + "' must be at stage " + std::to_string(last_stage));
      }
      continue;
    }
    if (var.stage >= last_stage && var.kind == VarKind::hidden) {
      report(ViolationKind::hidden_after_outcome, "hidden '" + var.label + "' placed at the outcome stage or later");
      continue;
    }
    if (var.stage < 1 || var.stage >= last_stage) {
      report(ViolationKind::bad_stage_order,
             "'" + var.label + "' has stage " + std::to_string(var.stage) + " outside 1.." + std::to_string(d.n_stages));
      continue;
    }
    if (var.kind == VarKind::action) ++actions_per_stage[var.stage];
  }
  if (outcomes == 0) report(ViolationKind::missing_outcome, "no outcome variable");
  if (outcomes > 1) report(ViolationKind::multiple_outcomes, std::to_string(outcomes) + " outcome variables");
  for (int i = 1; i <= d.n_stages; ++i) {
    if (actions_per_stage[i] != 1) {
      report(ViolationKind::action_count,
             "stage " + std::to_string(i) + " has " + std::to_string(actions_per_stage[i]) + " actions, expected 1");
    }
  }

  // Declaration order must be stage-major with each action closing its stage.
  for (int v = 1; v < n; ++v) {
    const auto& prev = d.vars[v - 1];
    const auto& cur = d.vars[v];
    if (cur.stage < prev.stage) {
      report(ViolationKind::bad_stage_order, "'" + cur.label + "' (stage " + std::to_string(cur.stage) +
                                                 ") declared after '" + prev.label + "' (stage " +
                                                 std::to_string(prev.stage) + ")");
    } else if (cur.stage == prev.stage && prev.kind == VarKind::action) {
      report(ViolationKind::bad_stage_order,
             "'" + cur.label + "' declared after action '" + prev.label + "' of the same stage");
    }
  }

  std::set<std::pair<int, int>> arcs;
  for (const auto& e : d.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      report(ViolationKind::edge_against_order, "edge endpoint out of range");
      continue;
    }
    if (e.from >= e.to) {
      report(ViolationKind::edge_against_order, "edge " + d.vars[e.from].label + " -> " + d.vars[e.to].label +
                                                    " runs against the total order");
    }
    if (!arcs.emplace(e.from, e.to).second) {
      report(ViolationKind::duplicate_edge, "edge " + d.vars[e.from].label + " -> " + d.vars[e.to].label + " repeated");
    }
  }
  return out;
}

void require_valid(const StagedDiagram& d) {
  auto violations = validate_diagram(d);
  if (violations.empty()) return;
  std::string text;
  for (const auto& v : violations) {
    if (!text.empty()) text += "; ";
    text += std::string(to_string(v.kind)) + ": " + v.message;
  }
  throw Error(Errc::invalid_diagram, text);
}

StrategyParentSpec StrategyParentSpec::full_history(const StagedDiagram& d) {
  StrategyParentSpec spec;
  for (int i = 1; i <= d.n_stages; ++i) spec.parents.push_back(d.observed_before(d.action(i)));
  return spec;
}

StrategyParentSpec StrategyParentSpec::unconditional(const StagedDiagram& d) {
  StrategyParentSpec spec;
  spec.parents.assign(static_cast<std::size_t>(d.n_stages), {});
  return spec;
}

std::vector<std::string> spec_violations(const StagedDiagram& d, const StrategyParentSpec& spec) {
  std::vector<std::string> out;
  if (static_cast<int>(spec.parents.size()) != d.n_stages) {
    out.push_back("spec lists " + std::to_string(spec.parents.size()) + " actions, diagram has " +
                  std::to_string(d.n_stages));
    return out;
  }
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const auto& pa = spec.of(i);
    if (!std::is_sorted(pa.begin(), pa.end()) || std::adjacent_find(pa.begin(), pa.end()) != pa.end()) {
      out.push_back("strategy parents of '" + d.label(a) + "' must be ascending and distinct");
    }
    for (int p : pa) {
      if (p < 0 || p >= d.size()) {
        out.push_back("strategy parent index " + std::to_string(p) + " out of range");
      } else if (!d.is_observed(p)) {
        out.push_back("strategy for '" + d.label(a) + "' cannot depend on hidden '" + d.label(p) + "'");
      } else if (p >= a || d.kind(p) == VarKind::outcome) {
        out.push_back("strategy for '" + d.label(a) + "' cannot depend on later '" + d.label(p) + "'");
      }
    }
  }
  return out;
}

void require_valid(const StagedDiagram& d, const StrategyParentSpec& spec) {
  auto violations = spec_violations(d, spec);
  if (violations.empty()) return;
  std::string text;
  for (const auto& v : violations) {
    if (!text.empty()) text += "; ";
    text += v;
  }
  throw Error(Errc::invalid_spec, text);
}

bool is_full_history(const StagedDiagram& d, const StrategyParentSpec& spec) {
  return spec == StrategyParentSpec::full_history(d);
}

Dag augment_with_regime(const StagedDiagram& d) {
  require_valid(d);
  return augment_with_regime(d.to_dag(), d);
}

Dag augment_with_regime(const Dag& dprime, const StagedDiagram& d) {
  if (dprime.find(kRegimeLabel)) {
    throw Error(Errc::regime_already_present, "graph already contains '" + std::string(kRegimeLabel) + "'");
  }
  std::vector<std::string> labels = dprime.labels();
  const int sigma = static_cast<int>(labels.size());
  labels.emplace_back(kRegimeLabel);
  std::vector<Arc> arcs = dprime.arcs();
  for (int i = 1; i <= d.n_stages; ++i) arcs.emplace_back(sigma, dprime.index_of(d.label(d.action(i))));
  return Dag::from_arcs(std::move(labels), std::move(arcs));
}

Dag strip_regime(const Dag& g) {
  auto sigma = g.find(kRegimeLabel);
  if (!sigma) throw Error(Errc::no_regime_node, "graph has no '" + std::string(kRegimeLabel) + "' node");
  auto remap = [&](int v) { return v > *sigma ? v - 1 : v; };
  std::vector<std::string> labels;
  for (int v = 0; v < g.size(); ++v) {
    if (v != *sigma) labels.push_back(g.label(v));
  }
  std::vector<Arc> arcs;
  for (auto [from, to] : g.arcs()) {
    if (from != *sigma && to != *sigma) arcs.emplace_back(remap(from), remap(to));
  }
  return Dag::from_arcs(std::move(labels), std::move(arcs));
}

StagedDiagram normalize_parents(const StagedDiagram& d, const StrategyParentSpec& spec) {
  require_valid(d);
  require_valid(d, spec);
  StagedDiagram out = d;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const auto pa_o = d.parents(a);
    for (int p : spec.of(i)) {
      if (!std::binary_search(pa_o.begin(), pa_o.end(), p)) out.edges.push_back({p, a, true});
    }
  }
  return out;
}

Dag build_check_graph(const StagedDiagram& d, const StrategyParentSpec& spec, int stage) {
  require_valid(d);
  require_valid(d, spec);
  if (stage < 0 || stage > d.n_stages) {
    throw Error(Errc::stage_out_of_range, "check graph index " + std::to_string(stage) + " outside 0.." +
                                              std::to_string(d.n_stages));
  }
  std::vector<std::string> labels;
  for (const auto& var : d.vars) labels.push_back(var.label);
  const int sigma = d.size();
  if (stage > 0) labels.emplace_back(kRegimeLabel);

  std::vector<Arc> arcs;
  for (const auto& e : d.edges) {
    if (d.kind(e.to) != VarKind::action) arcs.emplace_back(e.from, e.to);
  }
  for (int j = 1; j <= d.n_stages; ++j) {
    const int a = d.action(j);
    std::set<int> pa;
    if (j <= stage) {
      for (int p : d.parents(a)) pa.insert(p);
    }
    if (j >= stage) {
      for (int p : spec.of(j)) pa.insert(p);
    }
    for (int p : pa) arcs.emplace_back(p, a);
    if (j == stage) arcs.emplace_back(sigma, a);
  }
  return Dag::from_arcs(std::move(labels), std::move(arcs));
}

Dag build_pearl_robins_graph(const Dag& dprime, const StagedDiagram& d, const StrategyParentSpec& spec,
                             int stage) {
  if (stage < 1 || stage > d.n_stages) {
    throw Error(Errc::stage_out_of_range,
                "index " + std::to_string(stage) + " outside 1.." + std::to_string(d.n_stages));
  }
  require_valid(d, spec);
  const int target = dprime.index_of(d.label(d.action(stage)));
  // For each later action, the D' indices it may keep as parents.
  std::vector<std::pair<int, NodeSet>> later;
  for (int j = stage + 1; j <= d.n_stages; ++j) {
    NodeSet keep;
    for (int p : spec.of(j)) keep.insert(dprime.index_of(d.label(p)));
    later.emplace_back(dprime.index_of(d.label(d.action(j))), keep);
  }

  std::vector<Arc> arcs;
  for (auto [from, to] : dprime.arcs()) {
    if (from == target) continue;
    bool dropped = false;
    for (const auto& [action, keep] : later) {
      if (to == action && !keep.contains(from)) dropped = true;
    }
    if (!dropped) arcs.emplace_back(from, to);
  }
  return Dag::from_arcs(dprime.labels(), std::move(arcs));
}

}  // namespace seqident
