#include "seqident/stability.hpp"

#include <algorithm>
#include <cmath>

#include "seqident/error.hpp"

namespace seqident {

namespace {

NodeSet to_set(const std::vector<int>& vars) {
  NodeSet s;
  for (int v : vars) s.insert(v);
  return s;
}

// Nodes of the given kinds at stages in [first, last].
NodeSet stage_range(const StagedDiagram& d, int first, int last, std::initializer_list<VarKind> kinds) {
  NodeSet s;
  for (int v = 0; v < d.size(); ++v) {
    const auto& var = d.vars[v];
    if (var.stage < first || var.stage > last) continue;
    if (std::find(kinds.begin(), kinds.end(), var.kind) != kinds.end()) s.insert(v);
  }
  return s;
}

std::string render_query(const Dag& g, NodeSet x, NodeSet y, NodeSet z) {
  std::string text = (x.empty() ? "{}" : render_set(g, x)) + " _||_ " + render_set(g, y);
  if (!z.empty()) text += " | " + render_set(g, z);
  return text;
}

CheckEntry separation_entry(const Dag& g, int index, NodeSet x, NodeSet y, NodeSet z) {
  CheckEntry entry;
  entry.index = index;
  entry.query = render_query(g, x, y, z);
  if (x.empty()) return entry;
  const SeparationVerdict verdict = d_separated(g, x, y, z);
  entry.passed = verdict.separated;
  for (int v : verdict.witness) entry.witness.push_back(g.label(v));
  return entry;
}

void finish(IdentificationReport& report) {
  report.overall = std::all_of(report.entries.begin(), report.entries.end(),
                               [](const CheckEntry& e) { return e.informational || e.passed; });
}

bool has_stochastic_note_need(const StrategyParentSpec& spec) {
  return std::any_of(spec.parents.begin(), spec.parents.end(), [](const auto& pa) { return !pa.empty(); });
}

}  // namespace

const CheckEntry* IdentificationReport::entry(int index) const {
  for (const auto& e : entries) {
    if (e.index == index) return &e;
  }
  return nullptr;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::identified_simple: return "IdentifiedSimple";
    case Verdict::identified_general: return "IdentifiedGeneral";
    case Verdict::not_guaranteed: return "NotGuaranteed";
  }
  return "?";
}

IdentificationReport check_simple_stability(const StagedDiagram& d) {
  const Dag g = augment_with_regime(d);
  const NodeSet sigma{d.size()};
  IdentificationReport report;
  report.check = "simple_stability";
  for (int i = 1; i <= d.n_stages + 1; ++i) {
    const NodeSet block = to_set(d.covariate_block(i));
    const NodeSet past = stage_range(d, 1, i - 1, {VarKind::action, VarKind::covariate});
    report.entries.push_back(separation_entry(g, i, block, sigma, past));
  }
  finish(report);
  return report;
}

IdentificationReport check_extended_stability(const StagedDiagram& d) {
  const Dag g = augment_with_regime(d);
  const NodeSet sigma{d.size()};
  IdentificationReport report;
  report.check = "extended_stability";
  for (int i = 1; i <= d.n_stages + 1; ++i) {
    const NodeSet block = to_set(d.covariate_block(i)) | to_set(d.hidden_block(i));
    const NodeSet past = stage_range(d, 1, i - 1, {VarKind::action, VarKind::covariate, VarKind::hidden});
    report.entries.push_back(separation_entry(g, i, block, sigma, past));
  }
  finish(report);
  return report;
}

IdentificationReport check_general(const StagedDiagram& d, const StrategyParentSpec& spec) {
  require_valid(d);
  require_valid(d, spec);
  const NodeSet y{d.outcome()};
  const NodeSet sigma{d.size()};
  IdentificationReport report;
  report.check = "general";
  for (int i = 1; i <= d.n_stages; ++i) {
    const Dag g = build_check_graph(d, spec, i);
    const NodeSet past = stage_range(d, 1, i, {VarKind::action, VarKind::covariate});
    report.entries.push_back(separation_entry(g, i, y, sigma, past));
  }
  if (has_stochastic_note_need(spec)) {
    report.notes.push_back("the same separation test is applied to stochastic kernels over these parents");
  }
  finish(report);
  return report;
}

IdentificationReport check_pearl_robins(const StagedDiagram& d, const StrategyParentSpec& spec) {
  const StagedDiagram normalized = normalize_parents(d, spec);
  const Dag dprime = normalized.to_dag();
  const NodeSet y{d.outcome()};
  IdentificationReport report;
  report.check = "pearl_robins";
  for (int i = 1; i <= d.n_stages; ++i) {
    const Dag g = build_pearl_robins_graph(dprime, normalized, spec, i);
    const NodeSet past = stage_range(d, 1, i - 1, {VarKind::action}) | stage_range(d, 1, i, {VarKind::covariate});
    report.entries.push_back(separation_entry(g, i, y, NodeSet{d.action(i)}, past));
  }
  finish(report);
  return report;
}

IdentificationReport check_assumptions(const StagedDiagram& d, const StrategyParentSpec& spec) {
  require_valid(d);
  require_valid(d, spec);
  IdentificationReport report;
  report.check = "assumptions";
  const Dag d0 = build_check_graph(d, spec, 0);
  const int y = d.outcome();
  const NodeSet y_ancestors = ancestors(d0, NodeSet{y});

  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const auto pa_o = d.parents(a);
    CheckEntry entry;
    entry.index = i;
    entry.query = "pa_s(" + d.label(a) + ") subset of pa_o(" + d.label(a) + ")";
    for (int p : spec.of(i)) {
      if (!std::binary_search(pa_o.begin(), pa_o.end(), p)) {
        entry.passed = false;
        entry.witness.push_back(d.label(p));
      }
    }
    report.entries.push_back(std::move(entry));
  }

  NodeSet action_ancestors;
  for (int i = 1; i <= d.n_stages; ++i) action_ancestors |= ancestors(d0, NodeSet{d.action(i)}) - NodeSet{d.action(i)};
  for (int v = 0; v < d.size(); ++v) {
    if (d.kind(v) != VarKind::covariate) continue;
    CheckEntry entry;
    entry.index = d.vars[v].stage;
    entry.query = d.label(v) + " is an ancestor of " + d.label(y) + " in D_0";
    entry.passed = y_ancestors.contains(v);
    if (!entry.passed) entry.witness.push_back(d.label(v));
    report.entries.push_back(std::move(entry));
  }
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    CheckEntry entry;
    entry.index = i;
    entry.informational = true;
    entry.query = d.label(a) + " is an ancestor of " + d.label(y) + " in D_0";
    entry.passed = y_ancestors.contains(a);
    report.entries.push_back(std::move(entry));
  }
  for (int v = 0; v < d.size(); ++v) {
    if (d.kind(v) != VarKind::covariate) continue;
    CheckEntry entry;
    entry.index = d.vars[v].stage;
    entry.informational = true;
    entry.query = d.label(v) + " is an ancestor of some action in D_0";
    entry.passed = action_ancestors.contains(v);
    report.entries.push_back(std::move(entry));
  }
  finish(report);
  return report;
}

IdentificationReport check_theorem1_numeric(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                            double tol) {
  IdentificationReport report;
  report.check = "theorem1_numeric";
  const int y = d.outcome();
  const auto y_card = static_cast<std::size_t>(m.cards.at(static_cast<std::size_t>(y)));
  JointTable previous = mixed_joint_pi(m, d, s, 0);
  for (int i = 1; i <= d.n_stages; ++i) {
    JointTable current = mixed_joint_pi(m, d, s, i);
    const int a = d.action(i);
    std::vector<int> vars = d.observed_before(a);
    vars.push_back(a);
    vars.push_back(y);
    const JointTable before = marginalize(previous, vars);
    const JointTable after = marginalize(current, vars);

    CheckEntry entry;
    entry.index = i;
    entry.query = "p_" + std::to_string(i - 1) + "(" + d.label(y) + " | history) = p_" + std::to_string(i) + "(" +
                  d.label(y) + " | history)";
    double worst = 0.0;
    std::size_t skipped = 0;
    for (std::size_t h = 0; h < before.size() / y_card; ++h) {
      double pb = 0.0;
      double pa = 0.0;
      for (std::size_t v = 0; v < y_card; ++v) {
        pb += before[h * y_card + v];
        pa += after[h * y_card + v];
      }
      if (pb <= 0.0 || pa <= 0.0) {
        ++skipped;
        continue;
      }
      for (std::size_t v = 0; v < y_card; ++v) {
        worst = std::max(worst, std::abs(before[h * y_card + v] / pb - after[h * y_card + v] / pa));
      }
    }
    entry.deviation = worst;
    entry.passed = worst <= tol;
    if (skipped > 0) {
      report.notes.push_back("index " + std::to_string(i) + ": skipped " + std::to_string(skipped) +
                             " histories with zero probability under p_" + std::to_string(i - 1) + " or p_" +
                             std::to_string(i));
    }
    report.entries.push_back(std::move(entry));
    previous = std::move(current);
  }
  finish(report);
  return report;
}

Identification decide_identifiability(const StagedDiagram& d, const StrategyParentSpec& spec) {
  require_valid(d);
  require_valid(d, spec);
  Identification result;
  IdentificationReport simple = check_simple_stability(d);
  const bool simple_ok = simple.overall;
  result.reports.push_back(std::move(simple));
  if (simple_ok) {
    result.verdict = Verdict::identified_simple;
    return result;
  }
  IdentificationReport general = check_general(d, spec);
  const bool general_ok = general.overall;
  result.reports.push_back(std::move(general));
  if (!general_ok) {
    result.verdict = Verdict::not_guaranteed;
    return result;
  }
  if (is_full_history(d, spec)) {
    IdentificationReport assumptions = check_assumptions(normalize_parents(d, spec), spec);
    if (assumptions.overall) {
      throw Error(Errc::internal_theorem2_violation,
                  "general check passed for a full-history strategy while simple stability failed");
    }
    result.reports.push_back(std::move(assumptions));
  }
  result.verdict = Verdict::identified_general;
  return result;
}

}  // namespace seqident
