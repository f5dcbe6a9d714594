#include "seqident/evaluate.hpp"

#include <algorithm>
#include <limits>

#include "seqident/error.hpp"

namespace seqident {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

using Step = ObservationalConditionals::Step;
using StepKind = ObservationalConditionals::StepKind;

std::string describe_history(const ObservationalConditionals& oc, std::size_t prefix_length, std::size_t history) {
  const auto values = oc.decode_history(prefix_length, history);
  std::string text = "(";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) text += ", ";
    const int v = oc.observed()[k];
    text += oc.labels()[static_cast<std::size_t>(v)] + "=" + std::to_string(values[k]);
  }
  return text + ")";
}

// Kernel row of the strategy for each history of an action step.
std::vector<std::size_t> kernel_rows(const ObservationalConditionals& oc, const Step& step, const Cpt& kernel) {
  std::vector<std::size_t> positions;
  for (int p : kernel.parents) {
    auto it = std::find(oc.observed().begin(), oc.observed().begin() + static_cast<std::ptrdiff_t>(step.prefix_length), p);
    if (it == oc.observed().begin() + static_cast<std::ptrdiff_t>(step.prefix_length)) {
      throw Error(Errc::invalid_spec, "strategy parent is not observed before its action");
    }
    positions.push_back(static_cast<std::size_t>(it - oc.observed().begin()));
  }
  std::vector<std::size_t> rows(step.histories);
  for (std::size_t h = 0; h < step.histories; ++h) {
    const auto values = oc.decode_history(step.prefix_length, h);
    std::size_t r = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      r = r * static_cast<std::size_t>(oc.cards()[kernel.parents[k]]) + static_cast<std::size_t>(values[positions[k]]);
    }
    rows[h] = r;
  }
  return rows;
}

}  // namespace

const Step& ObservationalConditionals::block(int stage) const {
  for (const auto& step : steps_) {
    if (step.kind == StepKind::block && step.stage == stage) return step;
  }
  throw Error(Errc::stage_out_of_range, "no covariate block at stage " + std::to_string(stage));
}

const Step& ObservationalConditionals::action_step(int stage) const {
  for (const auto& step : steps_) {
    if (step.kind == StepKind::action && step.stage == stage) return step;
  }
  throw Error(Errc::stage_out_of_range, "no action at stage " + std::to_string(stage));
}

std::vector<int> ObservationalConditionals::decode_history(std::size_t prefix_length, std::size_t history) const {
  std::vector<int> values(prefix_length);
  for (std::size_t k = prefix_length; k-- > 0;) {
    const auto c = static_cast<std::size_t>(cards_[observed_[k]]);
    values[k] = static_cast<int>(history % c);
    history /= c;
  }
  return values;
}

ObservationalConditionals observational_conditionals(const DiscreteModel& m, const StagedDiagram& d) {
  require_valid(d);
  ObservationalConditionals oc;
  oc.n_stages_ = d.n_stages;
  oc.cards_.assign(static_cast<std::size_t>(d.size()), 0);
  for (const auto& v : d.vars) oc.labels_.push_back(v.label);
  for (int v = 0; v < d.size(); ++v) {
    if (d.is_observed(v)) {
      oc.observed_.push_back(v);
      oc.cards_[v] = m.cards.at(static_cast<std::size_t>(v));
    }
  }
  const JointTable observed = marginalize(joint(m, d), oc.observed_);

  // Prefix marginals are contiguous sums of the row-major observed table.
  auto prefix_marginal = [&](std::size_t length) {
    std::size_t suffix = 1;
    for (std::size_t k = length; k < oc.observed_.size(); ++k) suffix *= static_cast<std::size_t>(oc.cards_[oc.observed_[k]]);
    std::vector<double> out(observed.size() / suffix, 0.0);
    for (std::size_t h = 0; h < out.size(); ++h) {
      for (std::size_t r = 0; r < suffix; ++r) out[h] += observed[h * suffix + r];
    }
    return out;
  };

  std::size_t prefix = 0;
  std::size_t histories = 1;
  auto add_step = [&](StepKind kind, int stage, std::vector<int> vars) {
    Step step;
    step.kind = kind;
    step.stage = stage;
    step.prefix_length = prefix;
    step.histories = histories;
    for (int v : vars) step.width *= static_cast<std::size_t>(oc.cards_[v]);
    step.vars = std::move(vars);
    if (kind == StepKind::block) {
      const auto before = prefix_marginal(prefix);
      const auto after = prefix_marginal(prefix + step.vars.size());
      step.table.assign(histories * step.width, 0.0);
      step.defined.assign(histories, 0);
      for (std::size_t h = 0; h < histories; ++h) {
        if (before[h] <= 0.0) continue;
        step.defined[h] = 1;
        for (std::size_t l = 0; l < step.width; ++l) step.table[h * step.width + l] = after[h * step.width + l] / before[h];
      }
    }
    prefix += step.vars.size();
    histories *= step.width;
    oc.steps_.push_back(std::move(step));
  };

  for (int i = 1; i <= d.n_stages; ++i) {
    add_step(StepKind::block, i, d.covariate_block(i));
    add_step(StepKind::action, i, {d.action(i)});
  }
  add_step(StepKind::block, d.n_stages + 1, {d.outcome()});
  return oc;
}

EvaluationResult evaluate_g_recursion(const ObservationalConditionals& oc, const Strategy& s, const LossFunction& k,
                                      bool retain_tables) {
  const auto& steps = oc.steps();
  if (s.n_stages() != oc.n_stages()) throw Error(Errc::shape_mismatch, "strategy and conditionals differ in stages");
  const int y_card = oc.cards()[oc.outcome()];
  if (static_cast<int>(k.values.size()) != y_card) {
    throw Error(Errc::shape_mismatch, "loss has " + std::to_string(k.values.size()) + " values, outcome has " +
                                          std::to_string(y_card) + " states");
  }

  std::vector<std::vector<std::size_t>> rows(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (steps[t].kind != StepKind::action) continue;
    const Cpt& kernel = s.kernel_table(steps[t].stage);
    if (kernel.card != static_cast<int>(steps[t].width)) {
      throw Error(Errc::shape_mismatch, "strategy kernel has the wrong number of action states");
    }
    rows[t] = kernel_rows(oc, steps[t], kernel);
  }

  // Forward pass: which histories the strategy can reach.
  std::vector<char> reach{1};
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Step& step = steps[t];
    std::vector<char> next(step.histories * step.width, 0);
    for (std::size_t h = 0; h < step.histories; ++h) {
      if (!reach[h]) continue;
      if (step.kind == StepKind::action) {
        const auto row = s.kernel_table(step.stage).row(rows[t][h]);
        for (std::size_t a = 0; a < step.width; ++a) {
          if (row[a] > 0.0) next[h * step.width + a] = 1;
        }
        continue;
      }
      if (!step.defined[h]) {
        if (t > 0 && steps[t - 1].kind == StepKind::action) {
          const Step& prev = steps[t - 1];
          throw Error(Errc::positivity_violation,
                      "action " + std::to_string(h % prev.width) + " at stage " + std::to_string(prev.stage) +
                          " after history " + describe_history(oc, prev.prefix_length, h / prev.width) +
                          " has no observational support");
        }
        throw Error(Errc::masked_history_reachable,
                    "history " + describe_history(oc, step.prefix_length, h) + " is reachable but masked");
      }
      for (std::size_t l = 0; l < step.width; ++l) {
        if (step.table[h * step.width + l] > 0.0) next[h * step.width + l] = 1;
      }
    }
    reach = std::move(next);
  }

  // Backward pass, lexicographic summation order.
  std::vector<double> f(reach.size());
  for (std::size_t h = 0; h < f.size(); ++h) f[h] = k.values[h % static_cast<std::size_t>(y_card)];
  EvaluationResult result;
  result.method = "grecursion";
  std::vector<std::vector<double>> tables;
  if (retain_tables) tables.push_back(f);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const Step& step = steps[t];
    std::vector<double> g(step.histories, 0.0);
    for (std::size_t h = 0; h < step.histories; ++h) {
      double acc = 0.0;
      if (step.kind == StepKind::action) {
        const auto row = s.kernel_table(step.stage).row(rows[t][h]);
        for (std::size_t a = 0; a < step.width; ++a) {
          if (row[a] > 0.0) acc += row[a] * f[h * step.width + a];
        }
      } else if (!step.defined[h]) {
        acc = kUndefined;
      } else {
        for (std::size_t l = 0; l < step.width; ++l) {
          const double p = step.table[h * step.width + l];
          if (p > 0.0) acc += p * f[h * step.width + l];
        }
      }
      g[h] = acc;
    }
    f = std::move(g);
    if (retain_tables) tables.push_back(f);
  }
  result.value = f[0];
  if (retain_tables) {
    std::reverse(tables.begin(), tables.end());
    result.f_tables = std::move(tables);
  }
  return result;
}

EvaluationResult evaluate_oracle(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                 const LossFunction& k) {
  return {expectation(joint(m, d, s), k), "oracle", {}};
}

EvaluationResult evaluate_decomposition(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                        const LossFunction& k) {
  if (!s.deterministic()) {
    throw Error(Errc::not_deterministic, "the covariate decomposition is defined for deterministic strategies");
  }
  const int y = d.outcome();
  std::vector<int> vars;
  for (int v = 0; v < d.size(); ++v) {
    if (d.kind(v) == VarKind::covariate) vars.push_back(v);
  }
  vars.push_back(y);
  const JointTable table = marginalize(joint(m, d, s), vars);
  const auto y_card = static_cast<std::size_t>(m.cards[y]);
  if (k.values.size() != y_card) throw Error(Errc::shape_mismatch, "loss does not match the outcome");

  double value = 0.0;
  for (std::size_t l = 0; l < table.size() / y_card; ++l) {
    double p_l = 0.0;
    for (std::size_t v = 0; v < y_card; ++v) p_l += table[l * y_card + v];
    if (p_l <= 0.0) continue;
    double conditional = 0.0;
    for (std::size_t v = 0; v < y_card; ++v) conditional += k.values[v] * (table[l * y_card + v] / p_l);
    value += p_l * conditional;
  }
  return {value, "decomposition", {}};
}

}  // namespace seqident
